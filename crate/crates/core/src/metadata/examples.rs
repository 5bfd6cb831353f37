use std::collections::BTreeMap;

use serde::Serialize;

use crate::client::{RdfTerm, ResultSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleForm {
    Select,
    Construct,
    Ask,
    Describe,
}

impl ExampleForm {
    pub fn as_str(self) -> &'static str {
        match self {
            ExampleForm::Select => "select",
            ExampleForm::Construct => "construct",
            ExampleForm::Ask => "ask",
            ExampleForm::Describe => "describe",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QueryExample {
    pub id: String,
    pub form: ExampleForm,
    pub description: String,
    pub query: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub keywords: Vec<String>,
}

/// One example per resource, ordered by id. Resources without query text are
/// dropped; when a resource carries several texts or comments the
/// lexicographically smallest wins, so the outcome does not depend on row order.
pub fn examples_from_results(results: &ResultSet) -> Vec<QueryExample> {
    const TEXT_VARS: [(&str, ExampleForm); 4] = [
        ("q1", ExampleForm::Select),
        ("q2", ExampleForm::Construct),
        ("q3", ExampleForm::Ask),
        ("q4", ExampleForm::Describe),
    ];
    // id -> (best (form rank, text), smallest comment)
    type Entry = (Option<(usize, String)>, Option<String>);
    let mut by_id: BTreeMap<String, Entry> = BTreeMap::new();
    for row in &results.rows {
        let Some(id) = row.get("ex").map(RdfTerm::value) else { continue };
        let entry = by_id.entry(id.to_string()).or_default();
        for (rank, (var, _)) in TEXT_VARS.iter().enumerate() {
            if let Some(text) = row.get(*var).map(RdfTerm::value).filter(|t| !t.trim().is_empty()) {
                let candidate = (rank, text.to_string());
                if entry.0.as_ref().is_none_or(|current| candidate < *current) {
                    entry.0 = Some(candidate);
                }
            }
        }
        if let Some(comment) = row.get("c").map(RdfTerm::value) {
            if entry.1.as_deref().is_none_or(|current| comment < current) {
                entry.1 = Some(comment.to_string());
            }
        }
    }
    by_id
        .into_iter()
        .filter_map(|(id, (text, description))| {
            let (rank, query) = text?;
            Some(QueryExample {
                id,
                form: TEXT_VARS[rank].1,
                description: description.unwrap_or_default(),
                query,
                keywords: Vec::new(),
            })
        })
        .collect()
}

/// Case-insensitive substring match over description and query text.
pub fn filter_examples<'a>(examples: &'a [QueryExample], needle: &str) -> Vec<&'a QueryExample> {
    let needle = needle.to_lowercase();
    examples
        .iter()
        .filter(|e| e.description.to_lowercase().contains(&needle) || e.query.to_lowercase().contains(&needle))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn results() -> ResultSet {
        ResultSet::new(["ex", "q1", "q2", "q3", "q4", "c"])
            .with_row([
                ("ex", RdfTerm::iri("http://ex/q/2")),
                ("q2", RdfTerm::literal("CONSTRUCT { ?s ?p ?o } WHERE { ?s ?p ?o }")),
                ("c", RdfTerm::literal("Copy all triples")),
            ])
            .with_row([("ex", RdfTerm::iri("http://ex/q/1")), ("q1", RdfTerm::literal("SELECT * { ?s a ?Taxon }"))])
            .with_row([("ex", RdfTerm::iri("http://ex/q/3"))])
    }

    #[test]
    fn folds_and_sorts() {
        let examples = examples_from_results(&results());
        assert_eq!(examples.len(), 2);
        assert_eq!(examples[0].id, "http://ex/q/1");
        assert_eq!(examples[0].form, ExampleForm::Select);
        assert_eq!(examples[0].description, "");
        assert_eq!(examples[1].form, ExampleForm::Construct);
        assert_eq!(examples[1].description, "Copy all triples");
    }

    #[test]
    fn filter_is_case_insensitive() {
        let examples = examples_from_results(&results());
        let hits = filter_examples(&examples, "taxon");
        assert_eq!(hits.len(), 1);
        assert_eq!(filter_examples(&examples, "COPY").len(), 1);
        assert_eq!(filter_examples(&examples, "").len(), 2);
    }
}
