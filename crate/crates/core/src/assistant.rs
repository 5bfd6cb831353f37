//! Async entry point tying parsing, metadata caching and completion together.

use std::sync::Arc;
use std::time::Duration;

use crate::client::{ClientConfig, ClientError, EndpointRef, SparqlClient};
use crate::completion::{complete_in, target_endpoint, CompletionList, CompletionOptions, DEFAULT_LIMIT};
use crate::config::{ConfigError, KnownEndpoint, ServiceConfig};
use crate::metadata::{
    check_readiness, filter_examples, CacheConfig, CachedMetadata, MetadataCache, MetadataStatus, QueryExample,
    Readiness,
};
use crate::position::{offset_of, LineColumnError};
use crate::schema_graph::{build_graph, SchemaGraph};
use crate::syntax::{locate_context, parse_partial, PositionError, PrefixMap, Role};

#[derive(Debug, thiserror::Error)]
pub enum AssistError {
    #[error(transparent)]
    Endpoint(#[from] ClientError),
    #[error(transparent)]
    Position(#[from] PositionError),
    #[error(transparent)]
    LineColumn(#[from] LineColumnError),
    #[error("metadata for {endpoint} is unavailable: {message}")]
    Unavailable { endpoint: String, message: String },
}

pub struct Assistant {
    cache: MetadataCache,
    well_known: PrefixMap,
    endpoints: Vec<KnownEndpoint>,
    limit: usize,
}

impl Assistant {
    pub fn new(cache: MetadataCache, well_known: PrefixMap, endpoints: Vec<KnownEndpoint>) -> Self {
        Assistant { cache, well_known, endpoints, limit: DEFAULT_LIMIT }
    }

    pub fn from_config(config: &ServiceConfig) -> Result<Self, ConfigError> {
        let client = SparqlClient::new(ClientConfig {
            timeout: Duration::from_millis(config.request_timeout_ms),
            ..ClientConfig::default()
        });
        let cache = MetadataCache::new(client, config.cache_config());
        Ok(Self::new(cache, config.well_known_prefixes()?, config.endpoints.clone()))
    }

    /// Default client and cache settings, built-in prefixes.
    pub fn with_cache_config(cache: CacheConfig) -> Self {
        Self::new(MetadataCache::new(SparqlClient::default(), cache), crate::config::builtin_prefixes(), Vec::new())
    }

    pub fn cache(&self) -> &MetadataCache {
        &self.cache
    }

    pub fn well_known(&self) -> &PrefixMap {
        &self.well_known
    }

    pub fn known_endpoints(&self) -> &[KnownEndpoint] {
        &self.endpoints
    }

    fn options(&self, endpoint: &str) -> CompletionOptions {
        CompletionOptions {
            endpoint: Some(endpoint.to_string()),
            well_known: self.well_known.clone(),
            limit: self.limit,
            extra_endpoints: self.endpoints.iter().map(|e| e.url.clone()).collect(),
        }
    }

    /// Completes at a byte offset. Metadata for the endpoint that applies at
    /// the cursor is fetched first if the cache cannot serve it; fetch
    /// failures only degrade the result. `endpoint` itself must be a valid
    /// URL; an invalid SERVICE target inside the query only degrades.
    pub async fn complete(&self, endpoint: &str, text: &str, position: usize) -> Result<CompletionList, AssistError> {
        EndpointRef::new(endpoint)?;
        let tree = parse_partial(text);
        let context = locate_context(&tree, position)?;
        if matches!(context.role, Role::Predicate | Role::Object) {
            if let Some(target) = target_endpoint(&context, Some(endpoint)) {
                match EndpointRef::new(&target) {
                    Ok(target) => {
                        self.cache.get(&target).await;
                    }
                    Err(e) => tracing::debug!(error = %e, "skipping metadata for invalid endpoint"),
                }
            }
        }
        Ok(complete_in(&tree, &context, &self.cache, &self.options(endpoint)))
    }

    pub async fn complete_at(
        &self,
        endpoint: &str,
        text: &str,
        line: u32,
        column: u32,
    ) -> Result<CompletionList, AssistError> {
        let offset = offset_of(text, line, column)?;
        self.complete(endpoint, text, offset).await
    }

    pub async fn metadata(&self, endpoint: &str) -> Result<Arc<CachedMetadata>, AssistError> {
        let endpoint = EndpointRef::new(endpoint)?;
        Ok(self.cache.get(&endpoint).await)
    }

    /// Examples, optionally filtered. Fails only if the examples query failed.
    pub async fn examples(&self, endpoint: &str, filter: Option<&str>) -> Result<Vec<QueryExample>, AssistError> {
        let metadata = self.metadata(endpoint).await?;
        if let Some(message) = &metadata.examples_error {
            return Err(AssistError::Unavailable { endpoint: metadata.endpoint.clone(), message: message.clone() });
        }
        Ok(match filter {
            Some(needle) => filter_examples(&metadata.examples, needle).into_iter().cloned().collect(),
            None => metadata.examples.clone(),
        })
    }

    pub async fn schema_graph(&self, endpoint: &str, min_count: u64) -> Result<SchemaGraph, AssistError> {
        let metadata = self.metadata(endpoint).await?;
        match &metadata.schema {
            Some(schema) => Ok(build_graph(schema, min_count)),
            None => Err(AssistError::Unavailable {
                endpoint: metadata.endpoint.clone(),
                message: metadata.error.clone().unwrap_or_default(),
            }),
        }
    }

    /// Uncached check of which metadata `endpoint` offers. Fails when the
    /// endpoint cannot be reached.
    pub async fn readiness(&self, endpoint: &str) -> Result<Readiness, AssistError> {
        let target = EndpointRef::new(endpoint)?;
        Ok(check_readiness(self.cache.client(), &target, self.cache.templates(endpoint)).await?)
    }

    pub fn status(&self, endpoint: &str) -> MetadataStatus {
        self.cache.status(endpoint)
    }

    pub fn invalidate(&self, endpoint: &str) {
        self.cache.invalidate(endpoint);
    }
}
