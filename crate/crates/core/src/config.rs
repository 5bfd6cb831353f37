//! Deployment configuration (TOML).

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use crate::metadata::{CacheConfig, QueryTemplates, TemplateId, DEFAULT_FAILURE_TTL, DEFAULT_PROBE_LIMIT};
use crate::syntax::PrefixMap;

const BUILTIN_PREFIXES: &str = include_str!("../data/well_known_prefixes.json");

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid configuration: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnownEndpoint {
    pub url: String,
    #[serde(default)]
    pub label: Option<String>,
    /// Query texts replacing the defaults for this endpoint, by template id.
    #[serde(default)]
    pub templates: BTreeMap<TemplateId, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub port: u16,
    pub bind: String,
    pub ttl_seconds: u64,
    pub probe_limit: u32,
    pub request_timeout_ms: u64,
    pub endpoints: Vec<KnownEndpoint>,
    /// JSON object of extra prefix label → namespace entries.
    pub prefixes: Option<PathBuf>,
    pub cors_allow_origins: Vec<String>,
    pub templates: BTreeMap<TemplateId, String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            port: 8080,
            bind: "127.0.0.1".into(),
            ttl_seconds: 3600,
            probe_limit: DEFAULT_PROBE_LIMIT,
            request_timeout_ms: 10_000,
            endpoints: Vec::new(),
            prefixes: None,
            cors_allow_origins: vec!["*".into()],
            templates: BTreeMap::new(),
        }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: ServiceConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Loads a config file; a relative `prefixes` path is resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let mut config = Self::from_toml(&text)?;
        if let (Some(prefixes), Some(dir)) = (&config.prefixes, path.parent()) {
            if prefixes.is_relative() {
                config.prefixes = Some(dir.join(prefixes));
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.port == 0 {
            return Err(ConfigError::Invalid("port must be in 1..=65535".into()));
        }
        if self.ttl_seconds == 0 {
            return Err(ConfigError::Invalid("ttl_seconds must be positive".into()));
        }
        if self.request_timeout_ms == 0 {
            return Err(ConfigError::Invalid("request_timeout_ms must be positive".into()));
        }
        for endpoint in &self.endpoints {
            crate::client::EndpointRef::new(&endpoint.url).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Ok(())
    }

    pub fn ttl(&self) -> Duration {
        Duration::from_secs(self.ttl_seconds)
    }

    pub fn cache_config(&self) -> CacheConfig {
        let base = with_overrides(QueryTemplates::default().with_probe_limit(self.probe_limit), &self.templates);
        let endpoint_templates: HashMap<String, QueryTemplates> = self
            .endpoints
            .iter()
            .filter(|e| !e.templates.is_empty())
            .map(|e| (e.url.clone(), with_overrides(base.clone(), &e.templates)))
            .collect();
        CacheConfig {
            ttl: self.ttl(),
            failure_ttl: DEFAULT_FAILURE_TTL.min(self.ttl()),
            templates: base,
            endpoint_templates,
        }
    }

    /// Built-in well-known prefixes, extended and overridden by the
    /// configured prefix file.
    pub fn well_known_prefixes(&self) -> Result<PrefixMap, ConfigError> {
        let mut map = builtin_prefixes();
        if let Some(path) = &self.prefixes {
            let text =
                std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.clone(), source })?;
            for (label, ns) in parse_prefix_json(&text)?.iter() {
                map.insert(label, ns);
            }
        }
        Ok(map)
    }
}

fn with_overrides(mut templates: QueryTemplates, overrides: &BTreeMap<TemplateId, String>) -> QueryTemplates {
    for (id, text) in overrides {
        templates = templates.with_override(*id, text.clone());
    }
    templates
}

pub fn builtin_prefixes() -> PrefixMap {
    parse_prefix_json(BUILTIN_PREFIXES).expect("bundled prefix file is valid")
}

pub fn parse_prefix_json(text: &str) -> Result<PrefixMap, ConfigError> {
    let entries: BTreeMap<String, String> =
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(format!("prefix file: {e}")))?;
    Ok(entries.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let config = ServiceConfig::from_toml("").unwrap();
        assert_eq!(config, ServiceConfig::default());
        assert_eq!(config.bind, "127.0.0.1");
        assert_eq!(config.cors_allow_origins, ["*"]);
    }

    #[test]
    fn full_file() {
        let config = ServiceConfig::from_toml(
            r#"
            port = 9000
            ttl_seconds = 60
            [templates]
            probe-classes = "SELECT DISTINCT ?class WHERE { ?s a ?class }"
            [[endpoints]]
            url = "https://sparql.uniprot.org/sparql"
            label = "UniProt"
            [endpoints.templates]
            void = "SELECT * {}"
            "#,
        )
        .unwrap();
        assert_eq!(config.port, 9000);
        assert_eq!(config.endpoints[0].label.as_deref(), Some("UniProt"));
        let cache = config.cache_config();
        assert_eq!(cache.ttl, Duration::from_secs(60));
        let per = &cache.endpoint_templates["https://sparql.uniprot.org/sparql"];
        assert_eq!(per.text(TemplateId::Void), "SELECT * {}");
        assert!(per.text(TemplateId::ProbeClasses).starts_with("SELECT DISTINCT"));
    }

    #[test]
    fn invalid_values() {
        assert!(ServiceConfig::from_toml("port = 0").is_err());
        assert!(ServiceConfig::from_toml("port = 70000").is_err());
        assert!(ServiceConfig::from_toml("ttl_seconds = 0").is_err());
        assert!(ServiceConfig::from_toml("[[endpoints]]\nurl = \"ftp://x\"").is_err());
        assert!(ServiceConfig::from_toml("bogus = 1").is_err());
        assert!(ServiceConfig::from_toml("[templates]\nnope = \"x\"").is_err());
    }

    #[test]
    fn bundled_prefixes() {
        let map = builtin_prefixes();
        for label in ["rdf", "rdfs", "owl", "xsd", "sh", "void"] {
            assert!(map.namespace(label).is_some(), "{label}");
        }
    }
}
