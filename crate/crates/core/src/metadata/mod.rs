//! Endpoint metadata: VoID schema, query examples, probing fallback, caching.

mod cache;
mod examples;
mod fetch;
mod queries;
mod readiness;
mod schema;

use serde::Serialize;

pub use cache::{
    endpoint_key, CacheConfig, CacheState, CachedMetadata, MetadataCache, MetadataCounts, MetadataStatus,
    DEFAULT_FAILURE_TTL, DEFAULT_TTL,
};
pub use examples::{examples_from_results, filter_examples, ExampleForm, QueryExample};
pub use fetch::{fetch_examples, fetch_void, probe_fallback, VoidOutcome};
pub use queries::*;
pub use readiness::{check_readiness, Readiness};
pub use schema::{
    flatten_void_schema, fold_void_rows, probed_schema, void_rows, ClassProfile, PredicateProfile, SchemaSource,
    VoidRow, VoidSchema,
};

/// Where completion candidates came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Void,
    Probed,
    None,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Void => "void",
            Provenance::Probed => "probed",
            Provenance::None => "none",
        }
    }
}
