use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::{EdgeTarget, SchemaGraph};
use crate::syntax::PrefixMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
    Mermaid,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            "mermaid" => Ok(ExportFormat::Mermaid),
            other => Err(format!("unknown format '{other}' (expected dot, json or mermaid)")),
        }
    }
}

pub fn export(graph: &SchemaGraph, format: ExportFormat, prefixes: &PrefixMap) -> String {
    match format {
        ExportFormat::Dot => export_dot(graph, prefixes),
        ExportFormat::Json => export_json(graph, prefixes),
        ExportFormat::Mermaid => export_mermaid(graph, prefixes),
    }
}

/// Prefixed name if possible, else the last path or fragment segment.
fn label(iri: &str, prefixes: &PrefixMap) -> String {
    match prefixes.compact(iri) {
        Some((prefix, local)) => format!("{prefix}:{local}"),
        None => {
            let trimmed = iri.trim_end_matches(['/', '#']);
            let segment = trimmed.rfind(['/', '#']).map_or(trimmed, |i| &trimmed[i + 1..]);
            if segment.is_empty() {
                iri.to_string()
            } else {
                segment.to_string()
            }
        }
    }
}

/// Datatype node identity: prefixed name when possible, else `<iri>`.
fn datatype_id(iri: &str, prefixes: &PrefixMap) -> String {
    match prefixes.compact(iri) {
        Some((prefix, local)) => format!("{prefix}:{local}"),
        None => format!("<{iri}>"),
    }
}

fn dot_quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Class nodes are ellipses with one statement each; datatype and unknown
/// targets are implicit box-shaped nodes created by their edges.
pub fn export_dot(graph: &SchemaGraph, prefixes: &PrefixMap) -> String {
    if graph.nodes.is_empty() && graph.edges.is_empty() {
        return "digraph schema { }\n".to_string();
    }
    let mut out = String::from("digraph schema {\n  rankdir=LR;\n  node [shape=ellipse];\n");
    for node in &graph.nodes {
        let text = format!("{} ({})", label(&node.iri, prefixes), node.count);
        let _ =
            writeln!(out, "  {} [label={}, tooltip={}];", dot_quote(&node.iri), dot_quote(&text), dot_quote(&node.iri));
    }
    if !graph.edges.is_empty() {
        out.push_str("  node [shape=box];\n");
    }
    for edge in &graph.edges {
        let target = match &edge.target {
            EdgeTarget::Class(iri) => iri.clone(),
            EdgeTarget::Datatype(iri) => datatype_id(iri, prefixes),
            EdgeTarget::Unknown => "?".to_string(),
        };
        let text = format!("{} ({})", label(&edge.predicate, prefixes), edge.count);
        let _ = writeln!(
            out,
            "  {} -> {} [label={}, tooltip={}];",
            dot_quote(&edge.source),
            dot_quote(&target),
            dot_quote(&text),
            dot_quote(&edge.predicate)
        );
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize)]
struct JsonGraph<'a> {
    nodes: Vec<JsonNode<'a>>,
    edges: Vec<JsonEdge<'a>>,
}

#[derive(Serialize)]
struct JsonNode<'a> {
    iri: &'a str,
    label: String,
    count: u64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonEdge<'a> {
    source: &'a str,
    predicate: &'a str,
    target: Option<&'a str>,
    target_kind: &'static str,
    count: u64,
}

pub fn export_json(graph: &SchemaGraph, prefixes: &PrefixMap) -> String {
    let doc = JsonGraph {
        nodes: graph
            .nodes
            .iter()
            .map(|n| JsonNode { iri: &n.iri, label: label(&n.iri, prefixes), count: n.count })
            .collect(),
        edges: graph
            .edges
            .iter()
            .map(|e| {
                let (target, target_kind) = match &e.target {
                    EdgeTarget::Class(iri) => (Some(iri.as_str()), "class"),
                    EdgeTarget::Datatype(iri) => (Some(iri.as_str()), "datatype"),
                    EdgeTarget::Unknown => (None, "unknown"),
                };
                JsonEdge { source: &e.source, predicate: &e.predicate, target, target_kind, count: e.count }
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("graph serializes")
}

fn mermaid_text(text: &str) -> String {
    format!("\"{}\"", text.replace('"', "#quot;"))
}

pub fn export_mermaid(graph: &SchemaGraph, prefixes: &PrefixMap) -> String {
    let mut out = String::from("graph LR\n");
    let mut ids: BTreeMap<&str, String> = BTreeMap::new();
    for (i, node) in graph.nodes.iter().enumerate() {
        let id = format!("c{i}");
        let text = format!("{} ({})", label(&node.iri, prefixes), node.count);
        let _ = writeln!(out, "  {id}([{}])", mermaid_text(&text));
        ids.insert(&node.iri, id);
    }
    let mut datatypes: BTreeMap<&str, String> = BTreeMap::new();
    let mut unknown_count = 0;
    for edge in &graph.edges {
        let target = match &edge.target {
            EdgeTarget::Class(iri) => ids[iri.as_str()].clone(),
            EdgeTarget::Datatype(iri) => match datatypes.get(iri.as_str()) {
                Some(id) => id.clone(),
                None => {
                    let id = format!("d{}", datatypes.len());
                    let _ = writeln!(out, "  {id}[{}]", mermaid_text(&datatype_id(iri, prefixes)));
                    datatypes.insert(iri, id.clone());
                    id
                }
            },
            EdgeTarget::Unknown => {
                let id = format!("u{unknown_count}");
                unknown_count += 1;
                let _ = writeln!(out, "  {id}[\"?\"]");
                id
            }
        };
        let text = format!("{} ({})", label(&edge.predicate, prefixes), edge.count);
        let _ = writeln!(out, "  {} -->|{}| {target}", ids[edge.source.as_str()], mermaid_text(&text));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::build_graph;
    use super::super::tests::person_schema;
    use super::*;

    fn prefixes() -> PrefixMap {
        [("ex", "http://ex/"), ("xsd", "http://www.w3.org/2001/XMLSchema#")]
            .into_iter()
            .map(|(l, n)| (l.to_string(), n.to_string()))
            .collect()
    }

    #[test]
    fn person_dot() {
        let dot = export_dot(&build_graph(&person_schema(), 0), &prefixes());
        let expected = "digraph schema {
  rankdir=LR;
  node [shape=ellipse];
  \"http://ex/Person\" [label=\"ex:Person (25)\", tooltip=\"http://ex/Person\"];
  node [shape=box];
  \"http://ex/Person\" -> \"http://ex/Person\" [label=\"ex:knows (40)\", tooltip=\"http://ex/knows\"];
  \"http://ex/Person\" -> \"xsd:string\" [label=\"ex:name (100)\", tooltip=\"http://ex/name\"];
}
";
        assert_eq!(dot, expected);
    }

    #[test]
    fn empty_exports() {
        let empty = SchemaGraph::default();
        assert_eq!(export_dot(&empty, &prefixes()), "digraph schema { }\n");
        assert_eq!(export_json(&empty, &prefixes()), r#"{"nodes":[],"edges":[]}"#);
        assert_eq!(export_mermaid(&empty, &prefixes()), "graph LR\n");
    }

    #[test]
    fn person_json() {
        let json = export_json(&build_graph(&person_schema(), 0), &prefixes());
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["nodes"][0]["label"], "ex:Person");
        assert_eq!(value["edges"][1]["targetKind"], "datatype");
        assert_eq!(value["edges"][1]["target"], "http://www.w3.org/2001/XMLSchema#string");
    }

    #[test]
    fn labels_fall_back_to_last_segment() {
        let none = PrefixMap::new();
        assert_eq!(label("http://other.org/onto#Thing", &none), "Thing");
        assert_eq!(label("http://other.org/a/b/", &none), "b");
        assert_eq!(label("urn:x", &none), "urn:x");
    }

    #[test]
    fn mermaid_shapes() {
        let text = export_mermaid(&build_graph(&person_schema(), 0), &prefixes());
        assert!(text.contains("c0([\"ex:Person (25)\"])"));
        assert!(text.contains("d0[\"xsd:string\"]"));
        assert!(text.contains("c0 -->|\"ex:name (100)\"| d0"));
    }

    #[test]
    fn format_names() {
        assert_eq!("dot".parse(), Ok(ExportFormat::Dot));
        assert!("bogus".parse::<ExportFormat>().is_err());
    }
}
