use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{collect_prefixes, CursorContext, ScopeKind, SyntaxTree, Term, RDF_TYPE};

/// Classes explicitly asserted for each term via `rdf:type` / `a`.
/// Keys are normalized terms: prefixed names are expanded to IRIs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeMap(BTreeMap<Term, BTreeSet<String>>);

impl TypeMap {
    pub fn classes_of(&self, term: &Term) -> Option<&BTreeSet<String>> {
        self.0.get(term)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &BTreeSet<String>)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Types visible from the cursor: patterns in the cursor's scope and its
/// ancestors, not crossing a SERVICE boundary in either direction. A type
/// triple whose object is still being typed does not count.
pub fn infer_types(tree: &SyntaxTree, context: &CursorContext) -> TypeMap {
    let prefixes = collect_prefixes(tree);
    let mut chain = Vec::new();
    for scope in tree.scope_chain(context.scope) {
        chain.push(scope.id);
        if scope.kind == ScopeKind::Service {
            break;
        }
    }
    let mut map = TypeMap::default();
    for triple in tree.full_triples() {
        if !chain.contains(&triple.scope) {
            continue;
        }
        let (Some(predicate), Some(object)) = (&triple.predicate, &triple.object) else { continue };
        if object.span.start < context.position && context.position <= object.span.end {
            continue;
        }
        if predicate.term.resolve(&prefixes).as_deref() != Some(RDF_TYPE) {
            continue;
        }
        let Some(class) = object.term.resolve(&prefixes) else { continue };
        map.0.entry(triple.subject.term.normalized(&prefixes)).or_default().insert(class);
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{locate_context, parse_partial};

    fn types_at_end(text: &str) -> TypeMap {
        let tree = parse_partial(text);
        let ctx = locate_context(&tree, text.len()).unwrap();
        infer_types(&tree, &ctx)
    }

    fn var(name: &str) -> Term {
        Term::Variable(name.into())
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn untyped_pattern() {
        assert!(types_at_end("SELECT * { ?s ?p ?o }").is_empty());
    }

    #[test]
    fn subject_type_only() {
        let map = types_at_end("PREFIX ex: <http://ex/> SELECT * { ?x a ex:Person . ?x ex:knows ?y . ");
        assert_eq!(map.len(), 1);
        assert_eq!(map.classes_of(&var("x")), Some(&set(&["http://ex/Person"])));
        assert!(map.classes_of(&var("y")).is_none());
    }

    #[test]
    fn multiple_types_union() {
        let map = types_at_end("PREFIX ex: <http://ex/> SELECT * { ?x a ex:Person . ?x rdf:type ex:Nope . ?x <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> ex:Employee . ");
        assert_eq!(map.classes_of(&var("x")), Some(&set(&["http://ex/Employee", "http://ex/Person"])));
    }

    #[test]
    fn service_boundary() {
        let inside =
            types_at_end("PREFIX ex: <http://ex/> SELECT * { ?t a ex:Book . SERVICE <http://e2/> { ?u a ex:Gene . ?t ");
        assert_eq!(inside.len(), 1);
        assert!(inside.classes_of(&var("u")).is_some());
        let outside =
            types_at_end("PREFIX ex: <http://ex/> SELECT * { ?t a ex:Book . SERVICE <http://e2/> { ?u a ex:Gene } ?t ");
        assert_eq!(outside.len(), 1);
        assert!(outside.classes_of(&var("t")).is_some());
    }

    #[test]
    fn nested_groups_see_ancestors() {
        let map = types_at_end("PREFIX ex: <http://ex/> SELECT * { ?t a ex:Book . OPTIONAL { ?t ");
        assert!(map.classes_of(&var("t")).is_some());
        let sibling = types_at_end("PREFIX ex: <http://ex/> SELECT * { { ?t a ex:Book } UNION { ?t ");
        assert!(sibling.is_empty());
    }

    #[test]
    fn type_being_typed_is_ignored() {
        let map = types_at_end("PREFIX ex: <http://ex/> SELECT * { ?t a ex:Bo");
        assert!(map.is_empty());
    }
}
