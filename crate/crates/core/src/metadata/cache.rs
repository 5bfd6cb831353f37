use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};
use serde::Serialize;

use crate::client::{EndpointRef, SparqlClient};

use super::examples::QueryExample;
use super::fetch::{fetch_examples, fetch_void, probe_fallback, VoidOutcome};
use super::queries::QueryTemplates;
use super::schema::{SchemaSource, VoidSchema};
use super::Provenance;

pub const DEFAULT_TTL: Duration = Duration::from_secs(3600);
pub const DEFAULT_FAILURE_TTL: Duration = Duration::from_secs(60);

#[derive(Clone, Debug)]
pub struct CacheConfig {
    pub ttl: Duration,
    /// How long a failed fetch is served before trying again.
    pub failure_ttl: Duration,
    pub templates: QueryTemplates,
    /// Keyed by endpoint URL.
    pub endpoint_templates: HashMap<String, QueryTemplates>,
}

impl Default for CacheConfig {
    fn default() -> Self {
        CacheConfig {
            ttl: DEFAULT_TTL,
            failure_ttl: DEFAULT_FAILURE_TTL,
            templates: QueryTemplates::default(),
            endpoint_templates: HashMap::new(),
        }
    }
}

/// Immutable snapshot of what one fetch sequence learned about an endpoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CachedMetadata {
    pub endpoint: String,
    /// `None` when neither VoID nor probing produced a schema.
    pub schema: Option<VoidSchema>,
    pub examples: Vec<QueryExample>,
    pub examples_error: Option<String>,
    pub error: Option<String>,
    pub fetched_at: DateTime<Utc>,
}

impl CachedMetadata {
    pub fn provenance(&self) -> Provenance {
        match self.schema.as_ref().map(|s| s.source) {
            Some(SchemaSource::Void) => Provenance::Void,
            Some(SchemaSource::Probed) => Provenance::Probed,
            None => Provenance::None,
        }
    }

    pub fn is_failed(&self) -> bool {
        self.schema.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheState {
    Absent,
    Fetching,
    Fresh,
    Stale,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetadataCounts {
    pub classes: usize,
    pub predicates: usize,
    pub examples: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MetadataStatus {
    pub endpoint: String,
    pub state: CacheState,
    pub provenance: Provenance,
    pub fetched_at: Option<DateTime<Utc>>,
    pub counts: MetadataCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

struct Slot {
    data: Arc<CachedMetadata>,
    stored: Instant,
    invalidated: bool,
}

/// Per-endpoint metadata with TTL expiry. Concurrent misses for one endpoint
/// wait on a shared fetch instead of starting their own.
pub struct MetadataCache {
    client: SparqlClient,
    config: CacheConfig,
    slots: RwLock<HashMap<String, Slot>>,
    fetch_locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
    generations: Mutex<HashMap<String, u64>>,
}

/// Cache key for an endpoint IRI; matches [`EndpointRef::as_str`].
pub fn endpoint_key(iri: &str) -> String {
    match url::Url::parse(iri) {
        Ok(url) => url.to_string(),
        Err(_) => iri.to_string(),
    }
}

impl MetadataCache {
    pub fn new(client: SparqlClient, config: CacheConfig) -> Self {
        MetadataCache {
            client,
            config,
            slots: RwLock::default(),
            fetch_locks: Mutex::default(),
            generations: Mutex::default(),
        }
    }

    pub fn client(&self) -> &SparqlClient {
        &self.client
    }

    pub fn config(&self) -> &CacheConfig {
        &self.config
    }

    /// Templates used for `endpoint`, after per-endpoint overrides.
    pub fn templates(&self, endpoint: &str) -> &QueryTemplates {
        self.templates_for(&endpoint_key(endpoint))
    }

    fn templates_for(&self, key: &str) -> &QueryTemplates {
        self.config
            .endpoint_templates
            .iter()
            .find(|(url, _)| endpoint_key(url) == key)
            .map_or(&self.config.templates, |(_, t)| t)
    }

    fn fetch_lock(&self, key: &str) -> Arc<tokio::sync::Mutex<()>> {
        self.fetch_locks.lock().expect("lock map").entry(key.to_string()).or_default().clone()
    }

    fn generation(&self, key: &str) -> u64 {
        self.generations.lock().expect("generations").get(key).copied().unwrap_or(0)
    }

    fn usable(&self, key: &str) -> Option<Arc<CachedMetadata>> {
        let slots = self.slots.read().expect("slots");
        let slot = slots.get(key)?;
        let ttl = if slot.data.is_failed() { self.config.failure_ttl } else { self.config.ttl };
        (!slot.invalidated && slot.stored.elapsed() < ttl).then(|| slot.data.clone())
    }

    /// Cached metadata without any network activity, fresh or not.
    pub fn peek(&self, endpoint: &str) -> Option<Arc<CachedMetadata>> {
        self.slots.read().expect("slots").get(&endpoint_key(endpoint)).map(|s| s.data.clone())
    }

    /// Cached metadata if usable, otherwise fetches it (once, for all callers
    /// waiting on the same endpoint).
    pub async fn get(&self, endpoint: &EndpointRef) -> Arc<CachedMetadata> {
        let key = endpoint.as_str().to_string();
        if let Some(hit) = self.usable(&key) {
            return hit;
        }
        let lock = self.fetch_lock(&key);
        let _guard = lock.lock().await;
        if let Some(hit) = self.usable(&key) {
            return hit;
        }
        let generation = self.generation(&key);
        let data = Arc::new(self.fetch_all(endpoint, self.templates_for(&key)).await);
        let invalidated = self.generation(&key) != generation;
        self.slots
            .write()
            .expect("slots")
            .insert(key, Slot { data: data.clone(), stored: Instant::now(), invalidated });
        data
    }

    async fn fetch_all(&self, endpoint: &EndpointRef, templates: &QueryTemplates) -> CachedMetadata {
        let schema = async {
            let void_error = match fetch_void(&self.client, endpoint, templates).await {
                Ok(VoidOutcome::Found(schema)) => return Ok(schema),
                Ok(VoidOutcome::NoVoid) => None,
                Err(e) => Some(e),
            };
            probe_fallback(&self.client, endpoint, templates).await.map_err(|probe_error| match void_error {
                Some(v) => format!("VoID query failed ({v}); probing failed ({probe_error})"),
                None => format!("no VoID; probing failed ({probe_error})"),
            })
        };
        let examples = fetch_examples(&self.client, endpoint, templates);
        let (schema, examples) = tokio::join!(schema, examples);
        if let Err(e) = &schema {
            tracing::warn!(endpoint = endpoint.as_str(), error = %e, "metadata unavailable");
        }
        let (examples, examples_error) = match examples {
            Ok(list) => (list, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        let (schema, error) = match schema {
            Ok(s) => (Some(s), None),
            Err(e) => (None, Some(e)),
        };
        CachedMetadata {
            endpoint: endpoint.as_str().to_string(),
            schema,
            examples,
            examples_error,
            error,
            fetched_at: Utc::now(),
        }
    }

    /// Forces the next [`get`](Self::get) to refetch. A fetch already in
    /// flight completes, but its result is stored as stale.
    pub fn invalidate(&self, endpoint: &str) {
        let key = endpoint_key(endpoint);
        *self.generations.lock().expect("generations").entry(key.clone()).or_insert(0) += 1;
        if let Some(slot) = self.slots.write().expect("slots").get_mut(&key) {
            slot.invalidated = true;
        }
    }

    pub fn state(&self, endpoint: &str) -> CacheState {
        let key = endpoint_key(endpoint);
        let fetching =
            self.fetch_locks.lock().expect("lock map").get(&key).is_some_and(|lock| lock.try_lock().is_err());
        if fetching {
            return CacheState::Fetching;
        }
        let slots = self.slots.read().expect("slots");
        match slots.get(&key) {
            None => CacheState::Absent,
            Some(slot) if slot.data.is_failed() => CacheState::Failed,
            Some(slot) if slot.invalidated || slot.stored.elapsed() >= self.config.ttl => CacheState::Stale,
            Some(_) => CacheState::Fresh,
        }
    }

    pub fn status(&self, endpoint: &str) -> MetadataStatus {
        let state = self.state(endpoint);
        let data = self.peek(endpoint);
        let counts = match &data {
            Some(d) => MetadataCounts {
                classes: d.schema.as_ref().map_or(0, |s| s.classes.len()),
                predicates: d.schema.as_ref().map_or(0, VoidSchema::predicate_count),
                examples: d.examples.len(),
            },
            None => MetadataCounts { classes: 0, predicates: 0, examples: 0 },
        };
        MetadataStatus {
            endpoint: endpoint_key(endpoint),
            state,
            provenance: data.as_ref().map_or(Provenance::None, |d| d.provenance()),
            fetched_at: data.as_ref().map(|d| d.fetched_at),
            counts,
            error: data.and_then(|d| d.error.clone()),
        }
    }

    /// Endpoints with a cached entry, sorted.
    pub fn endpoints(&self) -> Vec<String> {
        let mut keys: Vec<String> = self.slots.read().expect("slots").keys().cloned().collect();
        keys.sort();
        keys
    }
}
