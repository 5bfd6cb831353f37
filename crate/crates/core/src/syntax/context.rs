use serde::Serialize;

use super::prefixes::PrefixMap;
use super::token::{Span, TokenKind};
use super::tree::{KeywordSet, Role, ScopeId, SyntaxTree, Term, TermNode};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("position {position} is outside the text (length {len})")]
pub struct PositionError {
    pub position: usize,
    pub len: usize,
}

/// Endpoint term of a SERVICE clause. `iri` is `None` when the term cannot be
/// dereferenced (a variable, or a prefixed name with an undeclared prefix).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ServiceEndpoint {
    pub term: TermNode,
    pub iri: Option<String>,
}

impl ServiceEndpoint {
    pub fn is_resolvable(&self) -> bool {
        self.iri.is_some()
    }
}

/// What is being typed at a cursor position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CursorContext {
    pub position: usize,
    pub role: Role,
    /// Keywords that fit at this position (meaningful for keyword and subject roles).
    pub keywords: KeywordSet,
    /// Text of the name-like token under the cursor, up to the cursor.
    pub partial: String,
    pub partial_span: Span,
    pub subject: Option<TermNode>,
    pub predicate: Option<TermNode>,
    pub scope: ScopeId,
    pub service: Option<ServiceEndpoint>,
}

pub fn locate_context(tree: &SyntaxTree, position: usize) -> Result<CursorContext, PositionError> {
    if position > tree.len() {
        return Err(PositionError { position, len: tree.len() });
    }
    let tokens = tree.tokens();
    let scope = tree.innermost_scope_at(position);
    let service = service_endpoint(tree, scope);

    let at = tokens.partition_point(|t| t.span.end < position);
    let containing = tokens.get(at).filter(|t| t.span.start < position);

    let mut partial = String::new();
    let mut partial_span = Span::empty(position);
    let mut inside_opaque_token = false;
    let gap = match containing {
        Some(tok) if is_name_like(tree, tok.kind, tok.span) => {
            partial_span = Span::new(tok.span.start, position);
            partial = tree.text_of(partial_span).to_string();
            tree.significant.partition_point(|&i| i < at)
        }
        Some(tok) => {
            inside_opaque_token = match tok.kind {
                TokenKind::Comment => true,
                TokenKind::Literal => position < tok.span.end,
                TokenKind::Error => true,
                _ => false,
            };
            tree.significant.partition_point(|&i| tokens[i].span.end <= position)
        }
        None => tree.significant.partition_point(|&i| tokens[i].span.end <= position),
    };

    let expectation = if inside_opaque_token { None } else { tree.expectations[gap].as_ref() };
    let (role, keywords, subject, predicate) = match expectation {
        Some(e) => (e.role, e.keywords, e.subject.clone(), e.predicate.clone()),
        None => (Role::Unknown, KeywordSet::None, None, None),
    };
    Ok(CursorContext { position, role, keywords, partial, partial_span, subject, predicate, scope, service })
}

/// Tokens a completion could replace. Bare words that are not keywords yet
/// lex as error fragments and still count.
fn is_name_like(tree: &SyntaxTree, kind: TokenKind, span: Span) -> bool {
    match kind {
        TokenKind::Keyword
        | TokenKind::Iri
        | TokenKind::PrefixedName
        | TokenKind::Variable
        | TokenKind::TypeShorthand
        | TokenKind::BlankNode => true,
        TokenKind::Error => {
            tree.source()[span.start..span.end].iter().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-'))
        }
        _ => false,
    }
}

fn service_endpoint(tree: &SyntaxTree, scope: ScopeId) -> Option<ServiceEndpoint> {
    let node = tree.service_of(scope)?;
    let term = node.endpoint.clone()?;
    let iri = match &term.term {
        Term::Variable(_) => None,
        other => other.resolve(&collect_prefixes(tree)),
    };
    Some(ServiceEndpoint { term, iri })
}

/// Endpoint of the innermost SERVICE group strictly containing `position`.
pub fn enclosing_service(tree: &SyntaxTree, position: usize) -> Option<ServiceEndpoint> {
    if position > tree.len() {
        return None;
    }
    service_endpoint(tree, tree.innermost_scope_at(position))
}

pub fn collect_prefixes(tree: &SyntaxTree) -> PrefixMap {
    let mut map = PrefixMap::new();
    for decl in &tree.prologue.prefixes {
        map.insert(decl.label.clone(), decl.namespace.clone());
    }
    if let Some(base) = &tree.prologue.base {
        map.set_base(base.clone());
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_partial;

    fn at_end(text: &str) -> CursorContext {
        let tree = parse_partial(text);
        locate_context(&tree, text.len()).unwrap()
    }

    #[test]
    fn empty_text_is_keyword_position() {
        let ctx = at_end("");
        assert_eq!(ctx.role, Role::Keyword);
        assert_eq!(ctx.keywords, KeywordSet::Query);
        assert_eq!(ctx.partial, "");
    }

    #[test]
    fn after_subject_is_predicate_position() {
        let ctx = at_end(
            "PREFIX up: <http://purl.uniprot.org/core/> SELECT ?species WHERE { ?species a up:Taxon . ?species ",
        );
        assert_eq!(ctx.role, Role::Predicate);
        assert_eq!(ctx.subject.unwrap().term, Term::Variable("species".into()));
        assert!(ctx.service.is_none());
    }

    #[test]
    fn inside_service_group() {
        let text = "SELECT * WHERE { SERVICE <http://e2.example/sparql> { ?x ";
        let ctx = at_end(text);
        assert_eq!(ctx.role, Role::Predicate);
        let svc = ctx.service.unwrap();
        assert_eq!(svc.iri.as_deref(), Some("http://e2.example/sparql"));
        let tree = parse_partial(text);
        assert_eq!(enclosing_service(&tree, text.len()).unwrap().iri.as_deref(), Some("http://e2.example/sparql"));
        assert!(enclosing_service(&tree, 5).is_none());
    }

    #[test]
    fn variable_service_endpoint_is_unresolvable() {
        let ctx = at_end("SELECT * WHERE { SERVICE ?ep { ?x ");
        let svc = ctx.service.unwrap();
        assert!(!svc.is_resolvable());
        assert_eq!(svc.term.term, Term::Variable("ep".into()));
    }

    #[test]
    fn service_brace_boundaries() {
        let text = "SELECT * { SERVICE <http://e/> { ?x ?p ?o } ?y ?q ?z }";
        let tree = parse_partial(text);
        let open = text.find("{ ?x").unwrap();
        let close = text.find("} ?y").unwrap();
        assert!(enclosing_service(&tree, open).is_none());
        assert!(enclosing_service(&tree, open + 1).is_some());
        assert!(enclosing_service(&tree, close).is_some());
        assert!(enclosing_service(&tree, close + 1).is_none());
    }

    #[test]
    fn object_position_carries_subject_and_predicate() {
        let ctx = at_end("SELECT * { ?s a ");
        assert_eq!(ctx.role, Role::Object);
        assert_eq!(ctx.subject.unwrap().term, Term::Variable("s".into()));
        assert_eq!(ctx.predicate.unwrap().term, Term::Iri(crate::syntax::RDF_TYPE.into()));
    }

    #[test]
    fn partial_token_under_cursor() {
        let text = "PREFIX up: <http://purl.uniprot.org/core/> SELECT * { ?s a up:Ta";
        let ctx = at_end(text);
        assert_eq!(ctx.role, Role::Object);
        assert_eq!(ctx.partial, "up:Ta");
        let mid = locate_context(&parse_partial(text), text.len() - 1).unwrap();
        assert_eq!(mid.partial, "up:T");
    }

    #[test]
    fn dot_resolves_to_subject() {
        let ctx = at_end("SELECT * { ?s ?p ?o . ");
        assert_eq!(ctx.role, Role::Subject);
        let ctx = at_end("SELECT * { ?s ?p ?o ");
        assert_eq!(ctx.role, Role::Keyword);
        assert_eq!(ctx.keywords, KeywordSet::Pattern);
    }

    #[test]
    fn predicate_after_semicolon() {
        let ctx = at_end("SELECT * { ?s ?p ?o ; ");
        assert_eq!(ctx.role, Role::Predicate);
        assert_eq!(ctx.subject.unwrap().term, Term::Variable("s".into()));
    }

    #[test]
    fn prefix_and_service_positions() {
        assert_eq!(at_end("PREFIX ").role, Role::PrefixDeclaration);
        assert_eq!(at_end("PREFIX ex: ").role, Role::PrefixDeclaration);
        assert_eq!(at_end("SELECT * { SERVICE ").role, Role::ServiceIri);
        assert_eq!(at_end("SELECT * { SERVICE <http://e").role, Role::ServiceIri);
    }

    #[test]
    fn keyword_partial_words() {
        let ctx = at_end("SEL");
        assert_eq!(ctx.role, Role::Keyword);
        assert_eq!(ctx.partial, "SEL");
        let ctx = at_end("SELECT * { OPT");
        assert_eq!(ctx.role, Role::Subject);
        assert_eq!(ctx.partial, "OPT");
    }

    #[test]
    fn inside_literal_or_comment_is_unknown() {
        assert_eq!(at_end("SELECT * { ?s ?p \"abc").role, Role::Unknown);
        assert_eq!(at_end("SELECT * { # note").role, Role::Unknown);
        let text = "SELECT * { ?s ?p \"abc\" }";
        let tree = parse_partial(text);
        assert_eq!(locate_context(&tree, text.find("bc").unwrap()).unwrap().role, Role::Unknown);
    }

    #[test]
    fn out_of_range() {
        let tree = parse_partial("abc");
        assert_eq!(locate_context(&tree, 4), Err(PositionError { position: 4, len: 3 }));
    }

    #[test]
    fn prefixes_shadow() {
        let tree = parse_partial("PREFIX ex: <http://one/> PREFIX ex: <http://two/> BASE <http://b/> SELECT *");
        let map = collect_prefixes(&tree);
        assert_eq!(map.len(), 1);
        assert_eq!(map.namespace("ex"), Some("http://two/"));
        assert_eq!(map.base(), Some("http://b/"));
        assert!(collect_prefixes(&parse_partial("")).is_empty());
    }
}
