use serde::Serialize;

use crate::client::{ClientError, EndpointRef, SparqlClient};

use super::fetch::{fetch_examples, fetch_void, probe_fallback, VoidOutcome};
use super::queries::QueryTemplates;

/// Which metadata an endpoint offers, checked without caching.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Readiness {
    pub endpoint: String,
    /// Class count when VoID is published.
    pub void_classes: Option<usize>,
    pub void_error: Option<String>,
    pub examples: Option<usize>,
    pub examples_error: Option<String>,
    /// Class and predicate counts from probing, when VoID is absent.
    pub probe: Option<(usize, usize)>,
    pub probe_error: Option<String>,
}

/// Fails only when the endpoint cannot be reached at all.
pub async fn check_readiness(
    client: &SparqlClient,
    endpoint: &EndpointRef,
    templates: &QueryTemplates,
) -> Result<Readiness, ClientError> {
    let (void, examples) =
        tokio::join!(fetch_void(client, endpoint, templates), fetch_examples(client, endpoint, templates));
    if let (Err(e @ ClientError::Transport { .. }), Err(ClientError::Transport { .. })) = (&void, &examples) {
        return Err(e.clone());
    }
    let mut out = Readiness {
        endpoint: endpoint.as_str().to_string(),
        void_classes: None,
        void_error: None,
        examples: None,
        examples_error: None,
        probe: None,
        probe_error: None,
    };
    match void {
        Ok(VoidOutcome::Found(schema)) => out.void_classes = Some(schema.classes.len()),
        Ok(VoidOutcome::NoVoid) => {}
        Err(e) => out.void_error = Some(e.to_string()),
    }
    match examples {
        Ok(list) => out.examples = Some(list.len()),
        Err(e) => out.examples_error = Some(e.to_string()),
    }
    if out.void_classes.is_none() {
        match probe_fallback(client, endpoint, templates).await {
            Ok(schema) => out.probe = Some((schema.classes.len(), schema.global_predicates.len())),
            Err(e) => out.probe_error = Some(e.to_string()),
        }
    }
    Ok(out)
}
