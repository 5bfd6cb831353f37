//! SPARQL 1.1 Query Results JSON Format.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RdfTerm {
    Iri(String),
    Literal { value: String, datatype: Option<String>, language: Option<String> },
    BlankNode(String),
}

impl RdfTerm {
    pub fn iri(value: impl Into<String>) -> Self {
        RdfTerm::Iri(value.into())
    }

    pub fn literal(value: impl Into<String>) -> Self {
        RdfTerm::Literal { value: value.into(), datatype: None, language: None }
    }

    pub fn typed(value: impl Into<String>, datatype: impl Into<String>) -> Self {
        RdfTerm::Literal { value: value.into(), datatype: Some(datatype.into()), language: None }
    }

    pub fn value(&self) -> &str {
        match self {
            RdfTerm::Iri(v) | RdfTerm::BlankNode(v) => v,
            RdfTerm::Literal { value, .. } => value,
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            RdfTerm::Iri(v) => Some(v),
            _ => None,
        }
    }

    /// Non-negative integer reading of a literal, accepting decimal and
    /// double lexical forms (`12`, `12.0`, `1.2E1`).
    pub fn as_count(&self) -> Option<u64> {
        let RdfTerm::Literal { value, .. } = self else { return None };
        let value = value.trim();
        if let Ok(n) = value.parse::<u64>() {
            return Some(n);
        }
        let f: f64 = value.parse().ok()?;
        (f.is_finite() && f >= 0.0).then(|| f.round() as u64)
    }
}

pub type Row = BTreeMap<String, RdfTerm>;

/// Decoded SELECT result. Unbound variables are absent from a row.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResultSet {
    pub vars: Vec<String>,
    pub rows: Vec<Row>,
}

impl ResultSet {
    pub fn new(vars: impl IntoIterator<Item = impl Into<String>>) -> Self {
        ResultSet { vars: vars.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn with_row<'a>(mut self, bindings: impl IntoIterator<Item = (&'a str, RdfTerm)>) -> Self {
        self.rows.push(bindings.into_iter().map(|(k, v)| (k.to_string(), v)).collect());
        self
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("invalid SPARQL results document: {0}")]
pub struct FormatError(pub String);

#[derive(Serialize, Deserialize)]
struct Document {
    head: Head,
    results: Results,
}

#[derive(Serialize, Deserialize)]
struct Head {
    #[serde(default)]
    vars: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct Results {
    bindings: Vec<BTreeMap<String, WireTerm>>,
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    #[serde(rename = "type")]
    kind: String,
    value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    datatype: Option<String>,
    #[serde(rename = "xml:lang", default, skip_serializing_if = "Option::is_none")]
    lang: Option<String>,
}

pub fn parse_results_json(bytes: &[u8]) -> Result<ResultSet, FormatError> {
    let doc: Document = serde_json::from_slice(bytes).map_err(|e| FormatError(e.to_string()))?;
    let mut rows = Vec::with_capacity(doc.results.bindings.len());
    for binding in doc.results.bindings {
        let mut row = Row::new();
        for (var, term) in binding {
            if !doc.head.vars.contains(&var) {
                return Err(FormatError(format!("variable '{var}' is bound but not declared in head.vars")));
            }
            let term = match term.kind.as_str() {
                "uri" => RdfTerm::Iri(term.value),
                "bnode" => RdfTerm::BlankNode(term.value),
                "literal" | "typed-literal" => {
                    RdfTerm::Literal { value: term.value, datatype: term.datatype, language: term.lang }
                }
                other => return Err(FormatError(format!("unknown term type '{other}'"))),
            };
            row.insert(var, term);
        }
        rows.push(row);
    }
    Ok(ResultSet { vars: doc.head.vars, rows })
}

pub fn encode_results_json(results: &ResultSet) -> String {
    let doc = Document {
        head: Head { vars: results.vars.clone() },
        results: Results {
            bindings: results
                .rows
                .iter()
                .map(|row| row.iter().map(|(var, term)| (var.clone(), to_wire(term))).collect())
                .collect(),
        },
    };
    serde_json::to_string(&doc).expect("results document serializes")
}

fn to_wire(term: &RdfTerm) -> WireTerm {
    match term {
        RdfTerm::Iri(v) => WireTerm { kind: "uri".into(), value: v.clone(), datatype: None, lang: None },
        RdfTerm::BlankNode(v) => WireTerm { kind: "bnode".into(), value: v.clone(), datatype: None, lang: None },
        RdfTerm::Literal { value, datatype, language } => WireTerm {
            kind: "literal".into(),
            value: value.clone(),
            datatype: datatype.clone(),
            lang: language.clone(),
        },
    }
}
