use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const VOID_NS: &str = "http://rdfs.org/ns/void#";
pub const VOID_EXT_NS: &str = "http://ldf.fi/void-ext#";
pub const SHACL_NS: &str = "http://www.w3.org/ns/shacl#";

/// Class partitions with their property partitions and object partitions.
pub const VOID_QUERY: &str = "PREFIX void: <http://rdfs.org/ns/void#>
PREFIX void-ext: <http://ldf.fi/void-ext#>
SELECT ?subjectClass ?entities ?prop ?triples ?objectClass ?objectDatatype
WHERE {
  ?cp void:class ?subjectClass ;
      void:entities ?entities ;
      void:propertyPartition ?pp .
  ?pp void:property ?prop .
  OPTIONAL { ?pp void:triples ?triples }
  OPTIONAL { ?pp void-ext:objectClassPartition [ void-ext:class ?objectClass ] }
  OPTIONAL { ?pp void-ext:datatypePartition [ void-ext:datatype ?objectDatatype ] }
}";

pub const EXAMPLES_QUERY: &str = "PREFIX sh: <http://www.w3.org/ns/shacl#>
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>
SELECT ?ex ?q1 ?q2 ?q3 ?q4 ?c
WHERE {
  ?ex a sh:SPARQLExecutable .
  OPTIONAL { ?ex sh:select ?q1 }
  OPTIONAL { ?ex sh:construct ?q2 }
  OPTIONAL { ?ex sh:ask ?q3 }
  OPTIONAL { ?ex sh:describe ?q4 }
  OPTIONAL { ?ex rdfs:comment ?c }
}";

pub const PROBE_CLASSES_QUERY: &str = "SELECT ?class (COUNT(?s) AS ?n) WHERE { ?s a ?class } GROUP BY ?class";
pub const PROBE_PREDICATES_QUERY: &str = "SELECT ?p (COUNT(*) AS ?n) WHERE { ?s ?p ?o } GROUP BY ?p";
/// Used when an endpoint rejects the aggregate probes.
pub const PROBE_CLASSES_DISTINCT_QUERY: &str = "SELECT DISTINCT ?class WHERE { ?s a ?class }";
pub const PROBE_PREDICATES_DISTINCT_QUERY: &str = "SELECT DISTINCT ?p WHERE { ?s ?p ?o }";

pub const DEFAULT_PROBE_LIMIT: u32 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TemplateId {
    Void,
    Examples,
    ProbeClasses,
    ProbePredicates,
    ProbeClassesDistinct,
    ProbePredicatesDistinct,
}

impl TemplateId {
    pub const ALL: [TemplateId; 6] = [
        TemplateId::Void,
        TemplateId::Examples,
        TemplateId::ProbeClasses,
        TemplateId::ProbePredicates,
        TemplateId::ProbeClassesDistinct,
        TemplateId::ProbePredicatesDistinct,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TemplateId::Void => "void",
            TemplateId::Examples => "examples",
            TemplateId::ProbeClasses => "probe-classes",
            TemplateId::ProbePredicates => "probe-predicates",
            TemplateId::ProbeClassesDistinct => "probe-classes-distinct",
            TemplateId::ProbePredicatesDistinct => "probe-predicates-distinct",
        }
    }

    fn is_probe(self) -> bool {
        !matches!(self, TemplateId::Void | TemplateId::Examples)
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemplateId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TemplateId::ALL.into_iter().find(|id| id.as_str() == s).ok_or_else(|| format!("unknown template id '{s}'"))
    }
}

/// The metadata query texts, each overridable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryTemplates {
    overrides: BTreeMap<TemplateId, String>,
    pub probe_limit: u32,
}

impl Default for QueryTemplates {
    fn default() -> Self {
        QueryTemplates { overrides: BTreeMap::new(), probe_limit: DEFAULT_PROBE_LIMIT }
    }
}

impl QueryTemplates {
    pub fn with_override(mut self, id: TemplateId, text: impl Into<String>) -> Self {
        self.overrides.insert(id, text.into());
        self
    }

    pub fn with_probe_limit(mut self, limit: u32) -> Self {
        self.probe_limit = limit;
        self
    }

    pub fn default_text(id: TemplateId) -> &'static str {
        match id {
            TemplateId::Void => VOID_QUERY,
            TemplateId::Examples => EXAMPLES_QUERY,
            TemplateId::ProbeClasses => PROBE_CLASSES_QUERY,
            TemplateId::ProbePredicates => PROBE_PREDICATES_QUERY,
            TemplateId::ProbeClassesDistinct => PROBE_CLASSES_DISTINCT_QUERY,
            TemplateId::ProbePredicatesDistinct => PROBE_PREDICATES_DISTINCT_QUERY,
        }
    }

    /// Query text as sent; probe queries get the configured LIMIT appended.
    pub fn text(&self, id: TemplateId) -> String {
        let base = self.overrides.get(&id).map_or(Self::default_text(id), String::as_str);
        if id.is_probe() && self.probe_limit > 0 {
            format!("{base} LIMIT {}", self.probe_limit)
        } else {
            base.to_string()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_partial, QueryForm};

    #[test]
    fn default_templates_parse_cleanly() {
        let templates = QueryTemplates::default();
        for id in TemplateId::ALL {
            let tree = parse_partial(templates.text(id));
            assert_eq!(tree.form, QueryForm::Select, "{id}");
            assert!(tree.errors.is_empty(), "{id}: {:?}", tree.errors);
        }
    }

    #[test]
    fn probe_limit_and_overrides() {
        let t = QueryTemplates::default();
        assert!(t.text(TemplateId::ProbeClasses).ends_with(" LIMIT 1000"));
        assert_eq!(t.text(TemplateId::Void), VOID_QUERY);
        let t = t.with_override(TemplateId::Void, "SELECT * {}");
        assert_eq!(t.text(TemplateId::Void), "SELECT * {}");
        assert_eq!("probe-predicates".parse::<TemplateId>(), Ok(TemplateId::ProbePredicates));
        assert!("nope".parse::<TemplateId>().is_err());
    }
}
