use std::fmt;

use serde::Serialize;

use super::prefixes::PrefixMap;
use super::token::{Span, Token};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryForm {
    Select,
    Construct,
    Ask,
    Describe,
    /// No query form keyword was recognized.
    Incomplete,
}

/// An RDF term (or opaque term-like construct) as written in a triple pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "type", content = "value", rename_all = "kebab-case")]
pub enum Term {
    /// Absolute or relative IRI without angle brackets. `a` is stored as
    /// `rdf:type` here.
    Iri(String),
    PrefixedName {
        prefix: String,
        local: String,
    },
    /// Variable name without its sigil; empty while the user is typing `?`.
    Variable(String),
    /// Raw literal source text, including language tag or datatype.
    Literal(String),
    /// Blank node label; `[...]` nodes get a label derived from their offset.
    BlankNode(String),
    /// Property path, kept as its source text.
    Path(String),
    /// RDF collection `( ... )`, kept as its source text.
    Collection(String),
}

impl Term {
    /// Absolute IRI for `Iri` and resolvable `PrefixedName` terms.
    pub fn resolve(&self, prefixes: &PrefixMap) -> Option<String> {
        match self {
            Term::Iri(iri) => Some(iri.clone()),
            Term::PrefixedName { prefix, local } => prefixes.expand(prefix, local),
            _ => None,
        }
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    /// Term with IRIs expanded, so `ex:A` and `<http://ex/A>` compare equal.
    pub fn normalized(&self, prefixes: &PrefixMap) -> Term {
        match self.resolve(prefixes) {
            Some(iri) => Term::Iri(iri),
            None => self.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::PrefixedName { prefix, local } => write!(f, "{prefix}:{local}"),
            Term::Variable(name) => write!(f, "?{name}"),
            Term::BlankNode(label) => write!(f, "_:{label}"),
            Term::Literal(text) | Term::Path(text) | Term::Collection(text) => f.write_str(text),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TermNode {
    pub term: Term,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ScopeId(pub usize);

impl ScopeId {
    pub const DOCUMENT: ScopeId = ScopeId(0);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScopeKind {
    /// The whole input; parent of every other scope.
    Document,
    Group,
    Optional,
    Union,
    Minus,
    Graph,
    Service,
    /// CONSTRUCT template.
    Template,
    /// Subquery, VALUES block, or EXISTS pattern: span-tracked only.
    Opaque,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Scope {
    pub id: ScopeId,
    pub kind: ScopeKind,
    pub parent: Option<ScopeId>,
    /// From the opening brace to the closing brace (or end of input).
    pub span: Span,
    /// Between the braces: positions where the cursor is "inside".
    pub inner: Span,
    pub closed: bool,
    /// Index into [`SyntaxTree::services`] for SERVICE scopes.
    pub service: Option<usize>,
}

impl Scope {
    pub fn contains_position(&self, position: usize) -> bool {
        self.inner.start <= position && position <= self.inner.end
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriplePattern {
    pub subject: TermNode,
    pub predicate: Option<TermNode>,
    pub object: Option<TermNode>,
    pub scope: ScopeId,
    /// All three terms present and followed by a terminator.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ServiceNode {
    pub endpoint: Option<TermNode>,
    pub silent: bool,
    pub scope: ScopeId,
    /// From the SERVICE keyword to the end of its group.
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixDecl {
    pub label: String,
    pub namespace: String,
    pub span: Span,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Prologue {
    pub prefixes: Vec<PrefixDecl>,
    pub base: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorNode {
    pub span: Span,
    pub message: String,
}

/// Grammatical role expected at a gap between tokens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Keyword,
    Subject,
    Predicate,
    Object,
    PrefixDeclaration,
    ServiceIri,
    Unknown,
}

/// Which keywords make sense at a keyword-ish position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeywordSet {
    /// Prologue and query form.
    Query,
    /// Between SELECT and the WHERE group.
    Projection,
    /// Dataset clauses before a WHERE group (FROM, WHERE).
    Dataset,
    /// Right after FROM.
    Named,
    /// Inside a group graph pattern.
    Pattern,
    /// After the WHERE group.
    Modifiers,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Expectation {
    pub role: Role,
    pub keywords: KeywordSet,
    pub scope: ScopeId,
    pub subject: Option<TermNode>,
    pub predicate: Option<TermNode>,
}

/// Error-tolerant parse of a (possibly partial) SPARQL query.
#[derive(Clone, Debug)]
pub struct SyntaxTree {
    pub(crate) source: Vec<u8>,
    pub(crate) tokens: Vec<Token>,
    /// Indices into `tokens` of non-trivia tokens.
    pub(crate) significant: Vec<usize>,
    /// One slot per significant token plus one for end of input: what the
    /// parser expected right before consuming that token.
    pub(crate) expectations: Vec<Option<Expectation>>,
    pub form: QueryForm,
    pub prologue: Prologue,
    pub scopes: Vec<Scope>,
    pub triples: Vec<TriplePattern>,
    pub services: Vec<ServiceNode>,
    pub errors: Vec<ErrorNode>,
}

impl SyntaxTree {
    pub fn source(&self) -> &[u8] {
        &self.source
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn scope(&self, id: ScopeId) -> &Scope {
        &self.scopes[id.0]
    }

    /// `id` followed by its ancestors up to the document scope.
    pub fn scope_chain(&self, id: ScopeId) -> impl Iterator<Item = &Scope> {
        std::iter::successors(Some(self.scope(id)), move |s| s.parent.map(|p| self.scope(p)))
    }

    /// Innermost scope whose interior contains `position`.
    pub fn innermost_scope_at(&self, position: usize) -> ScopeId {
        let mut current = ScopeId::DOCUMENT;
        // scopes are created in document order, so children follow parents
        for scope in &self.scopes[1..] {
            if scope.contains_position(position) && self.is_ancestor_or_self(current, scope.id) {
                current = scope.id;
            }
        }
        current
    }

    pub fn is_ancestor_or_self(&self, ancestor: ScopeId, id: ScopeId) -> bool {
        self.scope_chain(id).any(|s| s.id == ancestor)
    }

    /// Innermost SERVICE scope at or above `id`.
    pub fn service_of(&self, id: ScopeId) -> Option<&ServiceNode> {
        self.scope_chain(id).find_map(|s| s.service.map(|i| &self.services[i]))
    }

    pub fn text_of(&self, span: Span) -> &str {
        std::str::from_utf8(&self.source[span.start..span.end]).unwrap_or("")
    }

    /// Triples with all three terms present, in source order.
    pub fn full_triples(&self) -> impl Iterator<Item = &TriplePattern> {
        self.triples.iter().filter(|t| t.predicate.is_some() && t.object.is_some())
    }
}
