//! SPARQL query assistance: tolerant parsing of partial queries, endpoint
//! metadata (VoID, query examples, probing) and schema-aware completion.

pub mod assistant;
pub mod client;
pub mod completion;
pub mod config;
pub mod metadata;
pub mod position;
pub mod schema_graph;
pub mod syntax;

pub use assistant::{AssistError, Assistant};
