use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use sparql_assist_core::completion::{complete, CompletionKind, CompletionList, CompletionOptions, StaticMetadata};
use sparql_assist_core::metadata::{Provenance, VoidSchema};

mod common;

const E1: &str = "http://e1.example/sparql";
const E2: &str = "http://e2.example/sparql";

fn options(endpoint: &str) -> CompletionOptions {
    CompletionOptions { endpoint: Some(endpoint.into()), ..Default::default() }
}

fn predicates(list: &CompletionList) -> BTreeSet<String> {
    list.items.iter().filter(|i| i.kind == CompletionKind::Predicate).map(|i| i.value.clone()).collect()
}

/// Predicate → largest triple count over the given classes, counted directly.
fn expected_union(schema: &VoidSchema, classes: &BTreeSet<u8>) -> BTreeMap<String, u64> {
    let mut out: BTreeMap<String, u64> = BTreeMap::new();
    for c in classes {
        if let Some(profile) = schema.classes.get(&format!("http://ex/C{c}")) {
            for p in profile.predicates.values() {
                let slot = out.entry(p.iri.clone()).or_default();
                *slot = (*slot).max(p.triples);
            }
        }
    }
    out
}

fn typed_query(classes: &BTreeSet<u8>) -> String {
    let mut q = String::from("PREFIX ex: <http://ex/>\nSELECT * WHERE {\n");
    for c in classes {
        q.push_str(&format!("  ?x a ex:C{c} .\n"));
    }
    q.push_str("  ?x ");
    q
}

/// Moves every IRI of `schema` from `http://ex/` to `ns`.
fn renamespace(schema: &VoidSchema, ns: &str) -> VoidSchema {
    let move_iri = |iri: &str| iri.replace("http://ex/", ns);
    let mut out = VoidSchema::empty(schema.source);
    for class in schema.classes.values() {
        let mut class = class.clone();
        class.iri = move_iri(&class.iri);
        class.predicates = class
            .predicates
            .into_values()
            .map(|mut p| {
                p.iri = move_iri(&p.iri);
                p.object_classes = p.object_classes.iter().map(|c| move_iri(c)).collect();
                (p.iri.clone(), p)
            })
            .collect();
        out.classes.insert(class.iri.clone(), class);
    }
    out.global_predicates = schema.global_predicates.iter().map(|(p, n)| (move_iri(p), *n)).collect();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn typed_subject_gets_exactly_the_class_predicates(
        schema in common::schema(),
        classes in prop::collection::btree_set(0..8u8, 1..4),
    ) {
        let provider = StaticMetadata::new().with_schema(E1, schema.clone());
        let q = typed_query(&classes);
        let list = complete(&q, q.len(), &provider, &options(E1)).unwrap();
        let expected = expected_union(&schema, &classes);
        prop_assert_eq!(predicates(&list), expected.keys().cloned().collect::<BTreeSet<_>>());
        // order: score descending, then IRI
        let got: Vec<(u64, &str)> = list.items.iter().map(|i| (i.score, i.value.as_str())).collect();
        let mut want: Vec<(u64, &str)> = expected.iter().map(|(p, n)| (*n, p.as_str())).collect();
        want.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(b.1)));
        prop_assert_eq!(got, want);
        prop_assert_eq!(list.provenance, Provenance::Void);
    }

    #[test]
    fn partial_token_only_narrows(
        schema in common::schema(),
        classes in prop::collection::btree_set(0..8u8, 1..4),
        partial in prop::sample::select(vec!["ex:", "ex:p", "ex:p1", "ex:P2", "p", "p3", "<http://ex/p", "zz"]),
    ) {
        let provider = StaticMetadata::new().with_schema(E1, schema.clone());
        let q = format!("{}{partial}", typed_query(&classes));
        let list = complete(&q, q.len(), &provider, &options(E1)).unwrap();
        let allowed = expected_union(&schema, &classes);
        for item in &list.items {
            prop_assert!(allowed.contains_key(&item.value), "{} not licensed", item.value);
            let local = item.value.trim_start_matches("http://ex/").to_lowercase();
            let needle = partial.trim_start_matches("<http://ex/").trim_start_matches("ex:").to_lowercase();
            prop_assert!(local.starts_with(&needle));
        }
    }

    #[test]
    fn untyped_subject_gets_every_predicate(schema in common::schema()) {
        let provider = StaticMetadata::new().with_schema(E1, schema.clone());
        let q = "SELECT * WHERE { ?y ";
        let list = complete(q, q.len(), &provider, &options(E1)).unwrap();
        let mut all: BTreeSet<String> = schema.global_predicates.keys().cloned().collect();
        for class in schema.classes.values() {
            all.extend(class.predicates.keys().cloned());
        }
        prop_assert_eq!(predicates(&list), all);
    }

    #[test]
    fn service_blocks_are_isolated(
        a in common::schema(),
        b in common::schema(),
        outer in prop::collection::btree_set(0..8u8, 0..3),
        inner in prop::collection::btree_set(0..8u8, 0..3),
        cursor_inside in any::<bool>(),
    ) {
        let (a, b) = (renamespace(&a, "http://one.example/"), renamespace(&b, "http://two.example/"));
        let provider = StaticMetadata::new().with_schema(E1, a).with_schema(E2, b);
        let mut q = String::from("SELECT * WHERE {\n");
        for c in &outer {
            q.push_str(&format!("  ?t a <http://one.example/C{c}> .\n"));
        }
        q.push_str(&format!("  SERVICE <{E2}> {{\n"));
        for c in &inner {
            q.push_str(&format!("    ?t a <http://two.example/C{c}> .\n"));
        }
        let (own, foreign) = if cursor_inside {
            q.push_str("    ?t ");
            ("http://two.example/", "http://one.example/")
        } else {
            q.push_str("  }\n  ?t ");
            ("http://one.example/", "http://two.example/")
        };
        let list = complete(&q, q.len(), &provider, &options(E1)).unwrap();
        for item in list.items.iter().filter(|i| i.kind == CompletionKind::Predicate) {
            prop_assert!(item.value.starts_with(own));
            prop_assert!(!item.value.starts_with(foreign), "{} leaked across SERVICE", item.value);
        }
    }

    #[test]
    fn completion_is_deterministic(schema in common::schema(), classes in prop::collection::btree_set(0..8u8, 0..3)) {
        let provider = StaticMetadata::new().with_schema(E1, schema);
        let q = typed_query(&classes);
        for pos in [0, q.len() / 2, q.len()] {
            let a = complete(&q, pos, &provider, &options(E1)).unwrap();
            let b = complete(&q, pos, &provider, &options(E1)).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn missing_metadata_degrades(classes in prop::collection::btree_set(0..8u8, 0..3), cut in any::<prop::sample::Index>()) {
        let q = typed_query(&classes);
        let pos = cut.index(q.len() + 1);
        let list = complete(&q, pos, &StaticMetadata::new(), &options(E1)).unwrap();
        prop_assert_eq!(list.provenance, Provenance::None);
        prop_assert!(list.items.iter().all(|i| matches!(i.kind, CompletionKind::Keyword | CompletionKind::Variable)));
    }
}
