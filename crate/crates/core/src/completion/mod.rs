//! Context-aware completion over cached endpoint metadata.

mod infer;
mod keywords;
mod render;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use chrono::Utc;
use serde::Serialize;

use crate::metadata::{endpoint_key, CachedMetadata, MetadataCache, Provenance, SchemaSource, VoidSchema};
use crate::syntax::{
    collect_prefixes, locate_context, parse_partial, CursorContext, KeywordSet, PositionError, PrefixMap, Role,
    SyntaxTree, TokenKind, RDF_TYPE,
};

pub use infer::{infer_types, TypeMap};
pub use keywords::keywords_for;
pub use render::{render_iri, usable_well_known, AdditionalEdit, Rendered};

pub const DEFAULT_LIMIT: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CompletionKind {
    Class,
    Predicate,
    Keyword,
    Variable,
    Endpoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CompletionItem {
    pub value: String,
    pub label: String,
    pub kind: CompletionKind,
    pub score: u64,
    pub insert_text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub additional_edit: Option<AdditionalEdit>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompletionList {
    pub items: Vec<CompletionItem>,
    pub truncated: bool,
    pub provenance: Provenance,
    /// The partial token the items would replace.
    pub partial: String,
}

/// Read-only access to cached metadata. Implementations must not block on
/// the network.
pub trait MetadataProvider {
    fn metadata(&self, endpoint: &str) -> Option<Arc<CachedMetadata>>;

    /// Endpoint URLs offered after `SERVICE`.
    fn known_endpoints(&self) -> Vec<String> {
        Vec::new()
    }
}

impl MetadataProvider for MetadataCache {
    fn metadata(&self, endpoint: &str) -> Option<Arc<CachedMetadata>> {
        self.peek(endpoint)
    }

    fn known_endpoints(&self) -> Vec<String> {
        self.endpoints()
    }
}

/// In-memory provider over fixed schemas.
#[derive(Clone, Debug, Default)]
pub struct StaticMetadata {
    entries: HashMap<String, Arc<CachedMetadata>>,
}

impl StaticMetadata {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_schema(mut self, endpoint: &str, schema: VoidSchema) -> Self {
        let key = endpoint_key(endpoint);
        self.entries.insert(
            key.clone(),
            Arc::new(CachedMetadata {
                endpoint: key,
                schema: Some(schema),
                examples: Vec::new(),
                examples_error: None,
                error: None,
                fetched_at: Utc::now(),
            }),
        );
        self
    }
}

impl MetadataProvider for StaticMetadata {
    fn metadata(&self, endpoint: &str) -> Option<Arc<CachedMetadata>> {
        self.entries.get(&endpoint_key(endpoint)).cloned()
    }

    fn known_endpoints(&self) -> Vec<String> {
        let mut keys: Vec<String> = self.entries.keys().cloned().collect();
        keys.sort();
        keys
    }
}

#[derive(Clone, Debug)]
pub struct CompletionOptions {
    /// Endpoint used outside SERVICE blocks.
    pub endpoint: Option<String>,
    pub well_known: PrefixMap,
    pub limit: usize,
    /// Offered after SERVICE in addition to the provider's endpoints.
    pub extra_endpoints: Vec<String>,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        CompletionOptions {
            endpoint: None,
            well_known: PrefixMap::new(),
            limit: DEFAULT_LIMIT,
            extra_endpoints: Vec::new(),
        }
    }
}

/// Which endpoint's metadata applies at the cursor: the innermost SERVICE
/// endpoint if any (`None` when it cannot be resolved), else the default.
pub fn target_endpoint(context: &CursorContext, default: Option<&str>) -> Option<String> {
    match &context.service {
        Some(service) => service.iri.as_deref().map(endpoint_key),
        None => default.map(endpoint_key),
    }
}

pub fn complete(
    text: &str,
    position: usize,
    provider: &impl MetadataProvider,
    options: &CompletionOptions,
) -> Result<CompletionList, PositionError> {
    let tree = parse_partial(text);
    let context = locate_context(&tree, position)?;
    Ok(complete_in(&tree, &context, provider, options))
}

struct Candidate {
    value: String,
    kind: CompletionKind,
    score: u64,
}

pub fn complete_in(
    tree: &SyntaxTree,
    context: &CursorContext,
    provider: &impl MetadataProvider,
    options: &CompletionOptions,
) -> CompletionList {
    let declared = collect_prefixes(tree);
    let well_known = usable_well_known(&declared, &options.well_known);
    let metadata = target_endpoint(context, options.endpoint.as_deref()).and_then(|e| provider.metadata(&e));
    let schema = metadata.as_ref().and_then(|m| m.schema.as_ref());
    let provenance = metadata.as_ref().map_or(Provenance::None, |m| m.provenance());

    let mut candidates = Vec::new();
    let iri = |value: &String, kind, score| Candidate { value: value.clone(), kind, score };
    match context.role {
        Role::Predicate => {
            if let Some(schema) = schema {
                let predicates =
                    typed_predicates(tree, context, schema, &declared).unwrap_or_else(|| schema.all_predicates());
                candidates.extend(predicates.iter().map(|(p, n)| iri(p, CompletionKind::Predicate, *n)));
            }
        }
        Role::Object => {
            let is_type =
                context.predicate.as_ref().and_then(|p| p.term.resolve(&declared)).is_some_and(|p| p == RDF_TYPE);
            if let (true, Some(schema)) = (is_type, schema) {
                candidates.extend(schema.classes.values().map(|c| iri(&c.iri, CompletionKind::Class, c.instances)));
            }
            candidates.extend(variables(tree, context));
        }
        Role::Subject => {
            candidates.extend(variables(tree, context));
            candidates.extend(keyword_candidates(context.keywords));
        }
        Role::Keyword => {
            candidates.extend(keyword_candidates(context.keywords));
            if matches!(context.keywords, KeywordSet::Projection | KeywordSet::Modifiers) {
                candidates.extend(variables(tree, context));
            }
        }
        Role::ServiceIri => {
            let mut endpoints = provider.known_endpoints();
            endpoints.extend(options.extra_endpoints.iter().map(|e| endpoint_key(e)));
            endpoints.sort();
            endpoints.dedup();
            candidates.extend(endpoints.iter().map(|e| iri(e, CompletionKind::Endpoint, 0)));
        }
        Role::PrefixDeclaration | Role::Unknown => {}
    }

    let partial = context.partial.as_str();
    let mut items: Vec<CompletionItem> = candidates
        .into_iter()
        .filter(|c| matches_partial(c, partial, &declared, &well_known))
        .map(|c| to_item(c, &declared, &options.well_known))
        .collect();
    rank(&mut items);
    let truncated = items.len() > options.limit;
    items.truncate(options.limit);
    CompletionList { items, truncated, provenance, partial: context.partial.clone() }
}

/// Predicates licensed by the subject's explicit types. `None` when the
/// subject is untyped or the schema is probed, meaning "all predicates".
fn typed_predicates(
    tree: &SyntaxTree,
    context: &CursorContext,
    schema: &VoidSchema,
    declared: &PrefixMap,
) -> Option<BTreeMap<String, u64>> {
    if schema.source != SchemaSource::Void {
        return None;
    }
    let subject = context.subject.as_ref()?.term.normalized(declared);
    let types = infer_types(tree, context);
    let classes = types.classes_of(&subject)?;
    Some(schema.predicates_of(classes.iter().map(String::as_str)))
}

fn keyword_candidates(set: KeywordSet) -> impl Iterator<Item = Candidate> {
    keywords_for(set).iter().map(|k| Candidate { value: k.to_string(), kind: CompletionKind::Keyword, score: 0 })
}

/// Distinct variables of the document, except the one being typed.
fn variables(tree: &SyntaxTree, context: &CursorContext) -> Vec<Candidate> {
    let mut names: Vec<&str> = tree
        .tokens()
        .iter()
        .filter(|t| t.kind == TokenKind::Variable && t.span.len() > 1)
        .filter(|t| t.span.start != context.partial_span.start || context.partial.is_empty())
        .map(|t| tree.text_of(t.span))
        .map(|v| &v[1..])
        .collect();
    names.sort_unstable();
    names.dedup();
    names.into_iter().map(|n| Candidate { value: format!("?{n}"), kind: CompletionKind::Variable, score: 0 }).collect()
}

fn matches_partial(candidate: &Candidate, partial: &str, declared: &PrefixMap, well_known: &PrefixMap) -> bool {
    if partial.is_empty() {
        return true;
    }
    let starts_ci = |text: &str, prefix: &str| text.to_lowercase().starts_with(&prefix.to_lowercase());
    match candidate.kind {
        CompletionKind::Keyword => starts_ci(&candidate.value, partial),
        CompletionKind::Variable => match partial.strip_prefix(['?', '$']) {
            Some(name) => candidate.value[1..].starts_with(name),
            None => false,
        },
        CompletionKind::Class | CompletionKind::Predicate | CompletionKind::Endpoint => {
            let iri = candidate.value.as_str();
            if let Some(rest) = partial.strip_prefix('<') {
                return iri.starts_with(rest);
            }
            if let Some((label, local)) = partial.split_once(':') {
                let Some(ns) = declared.namespace(label).or_else(|| well_known.namespace(label)) else {
                    return false;
                };
                return iri.strip_prefix(ns).is_some_and(|l| starts_ci(l, local));
            }
            // bare word: a prefix label being typed, or a local name
            let labels = declared.iter().chain(well_known.iter());
            let mut by_label = labels.filter(|(l, ns)| l.starts_with(partial) && iri.starts_with(ns));
            by_label.next().is_some() || starts_ci(local_name(iri), partial)
        }
    }
}

fn local_name(iri: &str) -> &str {
    iri.rfind(['#', '/', ':']).map_or(iri, |i| &iri[i + 1..])
}

fn to_item(c: Candidate, declared: &PrefixMap, well_known: &PrefixMap) -> CompletionItem {
    match c.kind {
        CompletionKind::Class | CompletionKind::Predicate => {
            let rendered = render_iri(&c.value, declared, well_known);
            CompletionItem {
                label: rendered.insert_text.clone(),
                insert_text: rendered.insert_text,
                additional_edit: rendered.edit,
                value: c.value,
                kind: c.kind,
                score: c.score,
            }
        }
        CompletionKind::Endpoint => CompletionItem {
            label: c.value.clone(),
            insert_text: format!("<{}>", c.value),
            additional_edit: None,
            value: c.value,
            kind: c.kind,
            score: c.score,
        },
        CompletionKind::Keyword | CompletionKind::Variable => CompletionItem {
            label: c.value.clone(),
            insert_text: c.value.clone(),
            additional_edit: None,
            value: c.value,
            kind: c.kind,
            score: c.score,
        },
    }
}

/// Score descending, then value ascending.
pub fn rank(items: &mut [CompletionItem]) {
    items.sort_by(|a, b| b.score.cmp(&a.score).then_with(|| a.value.cmp(&b.value)).then_with(|| a.kind.cmp(&b.kind)));
}
