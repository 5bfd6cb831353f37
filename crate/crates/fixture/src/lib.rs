//! In-process SPARQL endpoint serving canned results, for tests and demos.
//!
//! Requests are matched either by metadata template id (compared against the
//! template texts the engine sends) or by exact query text, both after
//! whitespace normalization. Every request is recorded.

mod dataset;
pub mod scenarios;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use bytes::Bytes;
use http_body_util::{BodyExt, Full};
use hyper::body::Incoming;
use hyper::server::conn::http1;
use hyper::service::service_fn;
use hyper::{Method, Request, Response, StatusCode};
use hyper_util::rt::TokioIo;
use sparql_assist_core::client::{encode_results_json, ResultSet, RESULTS_JSON};
use sparql_assist_core::metadata::{QueryTemplates, TemplateId};
use tokio::net::TcpListener;
use tokio::task::JoinHandle;

pub use dataset::{Dataset, Object, XSD_STRING};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FixtureError {
    #[error("a response is already registered for {0}")]
    Duplicate(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Matcher {
    Template(TemplateId),
    Query(String),
}

impl Matcher {
    pub fn query(text: &str) -> Self {
        Matcher::Query(normalize(text))
    }

    fn describe(&self) -> String {
        match self {
            Matcher::Template(id) => format!("template {id}"),
            Matcher::Query(q) => format!("query '{q}'"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    /// Answer with this HTTP status and a short text body.
    Status(u16),
    /// Wait before answering normally.
    Delay(Duration),
    /// Close the connection without answering.
    Drop,
    /// Answer POST requests with 405, so clients must retry with GET.
    RejectPost,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordedRequest {
    pub method: String,
    pub query: String,
    pub template: Option<TemplateId>,
}

struct Injected {
    failure: Failure,
    remaining: Option<usize>,
}

#[derive(Default)]
struct State {
    templates: QueryTemplates,
    responses: HashMap<Matcher, Arc<String>>,
    failures: HashMap<Option<Matcher>, Injected>,
    requests: Vec<RecordedRequest>,
}

pub struct FixtureEndpoint {
    addr: SocketAddr,
    state: Arc<Mutex<State>>,
    server: JoinHandle<()>,
}

impl Drop for FixtureEndpoint {
    fn drop(&mut self) {
        self.server.abort();
    }
}

fn normalize(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

impl FixtureEndpoint {
    /// Binds to an ephemeral loopback port and starts serving.
    pub async fn start() -> std::io::Result<Self> {
        Self::with_templates(QueryTemplates::default()).await
    }

    /// Like [`start`](Self::start), recognizing the given template texts.
    pub async fn with_templates(templates: QueryTemplates) -> std::io::Result<Self> {
        let listener = TcpListener::bind(("127.0.0.1", 0)).await?;
        let addr = listener.local_addr()?;
        let state = Arc::new(Mutex::new(State { templates, ..Default::default() }));
        let server_state = state.clone();
        let server = tokio::spawn(async move {
            loop {
                let Ok((stream, _)) = listener.accept().await else { continue };
                let state = server_state.clone();
                tokio::spawn(async move {
                    let service = service_fn(move |req| handle(state.clone(), req));
                    let _ = http1::Builder::new().serve_connection(TokioIo::new(stream), service).await;
                });
            }
        });
        Ok(FixtureEndpoint { addr, state, server })
    }

    pub fn url(&self) -> String {
        format!("http://{}/sparql", self.addr)
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn register(&self, matcher: Matcher, results: &ResultSet) -> Result<(), FixtureError> {
        let mut state = self.state.lock().expect("fixture state");
        if state.responses.contains_key(&matcher) {
            return Err(FixtureError::Duplicate(matcher.describe()));
        }
        state.responses.insert(matcher, Arc::new(encode_results_json(results)));
        Ok(())
    }

    pub fn register_template(&self, id: TemplateId, results: &ResultSet) -> Result<(), FixtureError> {
        self.register(Matcher::Template(id), results)
    }

    pub fn register_query(&self, query: &str, results: &ResultSet) -> Result<(), FixtureError> {
        self.register(Matcher::query(query), results)
    }

    /// Applies `failure` to requests matching `matcher` (all requests when
    /// `None`), for the next `times` requests or indefinitely.
    pub fn inject_failure(&self, matcher: Option<Matcher>, failure: Failure, times: Option<usize>) {
        self.state.lock().expect("fixture state").failures.insert(matcher, Injected { failure, remaining: times });
    }

    pub fn clear_failures(&self) {
        self.state.lock().expect("fixture state").failures.clear();
    }

    pub fn request_count(&self) -> usize {
        self.state.lock().expect("fixture state").requests.len()
    }

    pub fn template_count(&self, id: TemplateId) -> usize {
        self.requests().iter().filter(|r| r.template == Some(id)).count()
    }

    pub fn requests(&self) -> Vec<RecordedRequest> {
        self.state.lock().expect("fixture state").requests.clone()
    }

    pub fn reset_requests(&self) {
        self.state.lock().expect("fixture state").requests.clear();
    }
}

fn text_response(status: StatusCode, body: &str) -> Response<Full<Bytes>> {
    Response::builder()
        .status(status)
        .header("content-type", "text/plain")
        .body(Full::new(Bytes::from(body.to_string())))
        .expect("static response")
}

async fn extract_query(req: Request<Incoming>) -> Option<(String, String)> {
    let method = req.method().clone();
    let from_pairs =
        |bytes: &[u8]| form_urlencoded::parse(bytes).find(|(k, _)| k == "query").map(|(_, v)| v.into_owned());
    let query = if method == Method::GET {
        from_pairs(req.uri().query().unwrap_or("").as_bytes())
    } else if method == Method::POST {
        let body = req.into_body().collect().await.ok()?.to_bytes();
        from_pairs(&body)
    } else {
        None
    }?;
    Some((method.to_string(), query))
}

#[derive(Debug)]
struct Dropped;

impl std::fmt::Display for Dropped {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("connection dropped by fixture")
    }
}

impl std::error::Error for Dropped {}

async fn handle(state: Arc<Mutex<State>>, req: Request<Incoming>) -> Result<Response<Full<Bytes>>, Dropped> {
    let Some((method, query)) = extract_query(req).await else {
        return Ok(text_response(StatusCode::BAD_REQUEST, "missing query parameter"));
    };
    let normalized = normalize(&query);

    let (template, failure, body) = {
        let mut state = state.lock().expect("fixture state");
        let template = TemplateId::ALL.into_iter().find(|id| normalize(&state.templates.text(*id)) == normalized);
        state.requests.push(RecordedRequest { method: method.clone(), query: query.clone(), template });
        let matchers = [template.map(Matcher::Template), Some(Matcher::Query(normalized.clone()))];
        let mut failure = None;
        for key in matchers.iter().filter(|m| m.is_some()).cloned().chain([None]) {
            if let Some(injected) = state.failures.get_mut(&key) {
                if injected.failure == Failure::RejectPost && method != "POST" {
                    continue;
                }
                if let Some(n) = injected.remaining.as_mut() {
                    if *n == 0 {
                        continue;
                    }
                    *n -= 1;
                }
                failure = Some(injected.failure.clone());
                break;
            }
        }
        let body = matchers.iter().flatten().find_map(|m| state.responses.get(m).cloned());
        (template, failure, body)
    };

    match failure {
        Some(Failure::Status(code)) => {
            let status = StatusCode::from_u16(code).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
            return Ok(text_response(status, "injected failure"));
        }
        Some(Failure::Drop) => return Err(Dropped),
        Some(Failure::RejectPost) => return Ok(text_response(StatusCode::METHOD_NOT_ALLOWED, "use GET")),
        Some(Failure::Delay(d)) => tokio::time::sleep(d).await,
        None => {}
    }

    let body = body.unwrap_or_else(|| {
        tracing::debug!(?template, query = %normalized, "fixture has no response registered; answering empty");
        Arc::new(encode_results_json(&ResultSet::default()))
    });
    Ok(Response::builder()
        .status(StatusCode::OK)
        .header("content-type", RESULTS_JSON)
        .body(Full::new(Bytes::from(body.as_str().to_owned())))
        .expect("static response"))
}
