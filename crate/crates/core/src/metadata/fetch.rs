use crate::client::{ClientError, EndpointRef, ResultSet, SparqlClient};

use super::examples::{examples_from_results, QueryExample};
use super::queries::{QueryTemplates, TemplateId};
use super::schema::{fold_void_rows, probed_schema, void_rows, VoidSchema};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VoidOutcome {
    Found(VoidSchema),
    /// The endpoint answered but publishes no usable VoID.
    NoVoid,
}

pub async fn fetch_void(
    client: &SparqlClient,
    endpoint: &EndpointRef,
    templates: &QueryTemplates,
) -> Result<VoidOutcome, ClientError> {
    let results = client.execute_select(endpoint, &templates.text(TemplateId::Void)).await?;
    let rows = void_rows(&results);
    if rows.is_empty() {
        return Ok(VoidOutcome::NoVoid);
    }
    Ok(VoidOutcome::Found(fold_void_rows(&rows)))
}

pub async fn fetch_examples(
    client: &SparqlClient,
    endpoint: &EndpointRef,
    templates: &QueryTemplates,
) -> Result<Vec<QueryExample>, ClientError> {
    let results = client.execute_select(endpoint, &templates.text(TemplateId::Examples)).await?;
    Ok(examples_from_results(&results))
}

/// Class and predicate lists from two probe queries. Endpoints that refuse
/// the aggregate form are asked for plain DISTINCT lists with zero counts.
pub async fn probe_fallback(
    client: &SparqlClient,
    endpoint: &EndpointRef,
    templates: &QueryTemplates,
) -> Result<VoidSchema, ClientError> {
    let (classes, predicates) = tokio::join!(
        probe(client, endpoint, templates, TemplateId::ProbeClasses, TemplateId::ProbeClassesDistinct),
        probe(client, endpoint, templates, TemplateId::ProbePredicates, TemplateId::ProbePredicatesDistinct),
    );
    Ok(probed_schema(&classes?, &predicates?))
}

async fn probe(
    client: &SparqlClient,
    endpoint: &EndpointRef,
    templates: &QueryTemplates,
    aggregate: TemplateId,
    distinct: TemplateId,
) -> Result<ResultSet, ClientError> {
    match client.execute_select(endpoint, &templates.text(aggregate)).await {
        Err(ClientError::Endpoint { status, .. }) => {
            tracing::debug!(endpoint = endpoint.as_str(), status, "aggregate probe rejected; retrying as DISTINCT");
            client.execute_select(endpoint, &templates.text(distinct)).await
        }
        other => other,
    }
}
