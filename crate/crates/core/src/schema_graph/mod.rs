//! Class/property graph derived from a [`VoidSchema`], with text exports.

mod export;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::metadata::VoidSchema;

pub use export::{export, export_dot, export_json, export_mermaid, ExportFormat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphNode {
    pub iri: String,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeTarget {
    Class(String),
    Datatype(String),
    /// The schema says nothing about the objects.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEdge {
    pub source: String,
    pub predicate: String,
    pub target: EdgeTarget,
    pub count: u64,
}

/// Nodes sorted by IRI; edges sorted by source, predicate, then target.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SchemaGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

/// One edge per object class and per datatype of each class predicate, or a
/// single edge to [`EdgeTarget::Unknown`] when neither is known. Edges below
/// `min_count` triples are dropped. Object classes without their own class
/// partition become nodes with count 0.
pub fn build_graph(schema: &VoidSchema, min_count: u64) -> SchemaGraph {
    let mut nodes: BTreeMap<&str, u64> = schema.classes.values().map(|c| (c.iri.as_str(), c.instances)).collect();
    let mut edges = Vec::new();
    for class in schema.classes.values() {
        for pred in class.predicates.values() {
            if pred.triples < min_count {
                continue;
            }
            let edge = |target| GraphEdge {
                source: class.iri.clone(),
                predicate: pred.iri.clone(),
                target,
                count: pred.triples,
            };
            if pred.object_classes.is_empty() && pred.object_datatypes.is_empty() {
                edges.push(edge(EdgeTarget::Unknown));
            }
            for object in &pred.object_classes {
                nodes.entry(object.as_str()).or_insert(0);
                edges.push(edge(EdgeTarget::Class(object.clone())));
            }
            for datatype in &pred.object_datatypes {
                edges.push(edge(EdgeTarget::Datatype(datatype.clone())));
            }
        }
    }
    edges.sort_by(|a, b| (&a.source, &a.predicate, &a.target).cmp(&(&b.source, &b.predicate, &b.target)));
    SchemaGraph {
        nodes: nodes.into_iter().map(|(iri, count)| GraphNode { iri: iri.to_string(), count }).collect(),
        edges,
    }
}
