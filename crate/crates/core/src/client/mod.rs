//! Minimal SPARQL 1.1 protocol client for SELECT queries.

mod results;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use reqwest::header::{HeaderMap, HeaderName, HeaderValue, ACCEPT, CONTENT_TYPE};
use reqwest::StatusCode;
use tokio::sync::Semaphore;
use url::Url;

pub use results::{encode_results_json, parse_results_json, FormatError, RdfTerm, ResultSet, Row};

pub const RESULTS_JSON: &str = "application/sparql-results+json";

const BODY_SNIPPET_BYTES: usize = 512;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ClientError {
    #[error("invalid endpoint: {0}")]
    InvalidEndpoint(String),
    #[error("transport error talking to {endpoint}: {message}")]
    Transport { endpoint: String, message: String },
    #[error("endpoint answered HTTP {status}: {body}")]
    Endpoint { status: u16, body: String },
    #[error(transparent)]
    Format(#[from] FormatError),
}

/// A SPARQL endpoint plus per-endpoint request settings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndpointRef {
    url: Url,
    timeout: Option<Duration>,
    headers: Vec<(String, String)>,
}

impl EndpointRef {
    pub fn new(url: &str) -> Result<Self, ClientError> {
        let parsed = Url::parse(url).map_err(|e| ClientError::InvalidEndpoint(format!("{url}: {e}")))?;
        if !matches!(parsed.scheme(), "http" | "https") || parsed.host_str().is_none() {
            return Err(ClientError::InvalidEndpoint(format!("{url}: not an absolute http(s) IRI")));
        }
        Ok(EndpointRef { url: parsed, timeout: None, headers: Vec::new() })
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Result<Self, ClientError> {
        if timeout.is_zero() {
            return Err(ClientError::InvalidEndpoint("timeout must be positive".into()));
        }
        self.timeout = Some(timeout);
        Ok(self)
    }

    pub fn with_header(mut self, name: &str, value: &str) -> Result<Self, ClientError> {
        HeaderName::from_bytes(name.as_bytes())
            .map_err(|_| ClientError::InvalidEndpoint(format!("bad header name '{name}'")))?;
        HeaderValue::from_str(value).map_err(|_| ClientError::InvalidEndpoint(format!("bad value for '{name}'")))?;
        self.headers.push((name.to_string(), value.to_string()));
        Ok(self)
    }

    pub fn url(&self) -> &Url {
        &self.url
    }

    pub fn as_str(&self) -> &str {
        self.url.as_str()
    }

    pub fn timeout(&self) -> Option<Duration> {
        self.timeout
    }
}

#[derive(Clone, Debug)]
pub struct ClientConfig {
    pub timeout: Duration,
    /// Extra attempts after a transport error. HTTP errors are never retried.
    pub retries: u32,
    pub max_body_bytes: usize,
    pub max_in_flight_per_endpoint: usize,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            timeout: Duration::from_secs(10),
            retries: 1,
            max_body_bytes: 50 * 1024 * 1024,
            max_in_flight_per_endpoint: 2,
        }
    }
}

/// Shareable client; clones share the connection pool and per-endpoint limits.
#[derive(Clone)]
pub struct SparqlClient {
    http: reqwest::Client,
    config: Arc<ClientConfig>,
    limits: Arc<Mutex<HashMap<String, Arc<Semaphore>>>>,
}

impl Default for SparqlClient {
    fn default() -> Self {
        Self::new(ClientConfig::default())
    }
}

impl SparqlClient {
    pub fn new(config: ClientConfig) -> Self {
        let http = reqwest::Client::builder()
            .user_agent(concat!("sparql-assist/", env!("CARGO_PKG_VERSION")))
            .build()
            .expect("HTTP client builds with static configuration");
        SparqlClient { http, config: Arc::new(config), limits: Arc::default() }
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    fn limit_for(&self, endpoint: &EndpointRef) -> Arc<Semaphore> {
        let mut limits = self.limits.lock().expect("limits lock");
        limits
            .entry(endpoint.as_str().to_string())
            .or_insert_with(|| Arc::new(Semaphore::new(self.config.max_in_flight_per_endpoint.max(1))))
            .clone()
    }

    /// Runs a SELECT query and decodes the JSON results.
    pub async fn execute_select(&self, endpoint: &EndpointRef, query: &str) -> Result<ResultSet, ClientError> {
        let limit = self.limit_for(endpoint);
        let _permit = limit.acquire().await.expect("semaphore never closed");
        let mut attempt = 0;
        loop {
            match self.send(endpoint, query).await {
                Err(ClientError::Transport { message, .. }) if attempt < self.config.retries => {
                    tracing::debug!(endpoint = endpoint.as_str(), %message, "retrying after transport error");
                    attempt += 1;
                }
                other => return other,
            }
        }
    }

    async fn send(&self, endpoint: &EndpointRef, query: &str) -> Result<ResultSet, ClientError> {
        let timeout = endpoint.timeout.unwrap_or(self.config.timeout);
        let mut headers = HeaderMap::new();
        for (name, value) in &endpoint.headers {
            headers.insert(
                HeaderName::from_bytes(name.as_bytes()).expect("validated"),
                HeaderValue::from_str(value).expect("validated"),
            );
        }
        headers.insert(ACCEPT, HeaderValue::from_static(RESULTS_JSON));

        let body: String = form_urlencoded::Serializer::new(String::new()).append_pair("query", query).finish();
        let post = self
            .http
            .post(endpoint.url.clone())
            .headers(headers.clone())
            .header(CONTENT_TYPE, "application/x-www-form-urlencoded")
            .timeout(timeout)
            .body(body);
        let mut response = post.send().await.map_err(|e| transport(endpoint, e))?;

        if response.status() == StatusCode::METHOD_NOT_ALLOWED {
            let mut url = endpoint.url.clone();
            url.query_pairs_mut().append_pair("query", query);
            response = self
                .http
                .get(url)
                .headers(headers)
                .timeout(timeout)
                .send()
                .await
                .map_err(|e| transport(endpoint, e))?;
        }

        let status = response.status();
        let bytes = self.read_body(endpoint, &mut response).await?;
        if !status.is_success() {
            let end = bytes.len().min(BODY_SNIPPET_BYTES);
            return Err(ClientError::Endpoint {
                status: status.as_u16(),
                body: String::from_utf8_lossy(&bytes[..end]).into_owned(),
            });
        }
        Ok(parse_results_json(&bytes)?)
    }

    async fn read_body(
        &self,
        endpoint: &EndpointRef,
        response: &mut reqwest::Response,
    ) -> Result<Vec<u8>, ClientError> {
        let cap = self.config.max_body_bytes;
        let mut body = Vec::new();
        while let Some(chunk) = response.chunk().await.map_err(|e| transport(endpoint, e))? {
            if body.len() + chunk.len() > cap {
                return Err(FormatError(format!("response body exceeds {cap} bytes")).into());
            }
            body.extend_from_slice(&chunk);
        }
        Ok(body)
    }
}

fn transport(endpoint: &EndpointRef, err: reqwest::Error) -> ClientError {
    let message = if err.is_timeout() { format!("timed out: {err}") } else { err.to_string() };
    ClientError::Transport { endpoint: endpoint.as_str().to_string(), message }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_validation() {
        assert!(EndpointRef::new("http://example.org/sparql").is_ok());
        assert!(EndpointRef::new("https://example.org/sparql").is_ok());
        assert!(EndpointRef::new("ftp://example.org/").is_err());
        assert!(EndpointRef::new("/relative").is_err());
        assert!(EndpointRef::new("mailto:a@b").is_err());
        let ep = EndpointRef::new("http://e/").unwrap();
        assert!(ep.clone().with_timeout(Duration::ZERO).is_err());
        assert!(ep.clone().with_header("bad name", "x").is_err());
        assert!(ep.with_header("X-Token", "abc").is_ok());
    }

    #[tokio::test]
    async fn unreachable_host_is_transport_error() {
        // port 9 on loopback: nothing listens there
        let client = SparqlClient::new(ClientConfig { retries: 0, ..Default::default() });
        let ep = EndpointRef::new("http://127.0.0.1:9/sparql").unwrap().with_timeout(Duration::from_secs(2)).unwrap();
        let err = client.execute_select(&ep, "SELECT * {}").await.unwrap_err();
        assert!(matches!(err, ClientError::Transport { .. }), "{err:?}");
    }
}
