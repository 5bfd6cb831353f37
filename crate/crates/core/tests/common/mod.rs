#![allow(dead_code)]

use proptest::prelude::*;
use sparql_assist_core::metadata::{fold_void_rows, VoidRow, VoidSchema};

/// A canonical row set: per class one entity count, per (class, predicate)
/// one triple count and either one bare row or one row per object class or
/// datatype.
pub fn canonical_rows() -> impl Strategy<Value = Vec<VoidRow>> {
    let pred =
        (0..6u8, 0..1000u64, prop::collection::btree_set(0..4u8, 0..3), prop::collection::btree_set(0..3u8, 0..2));
    let class = (0..1000u64, prop::collection::btree_map(0..6u8, pred, 0..5));
    prop::collection::btree_map(0..8u8, class, 0..6).prop_map(|classes| {
        let mut rows = Vec::new();
        for (c, (entities, preds)) in classes {
            for (p, (_, triples, ocs, dts)) in preds {
                let row = |oc: Option<u8>, dt: Option<u8>| VoidRow {
                    class: format!("http://ex/C{c}"),
                    entities,
                    predicate: format!("http://ex/p{p}"),
                    triples,
                    object_class: oc.map(|o| format!("http://ex/C{o}")),
                    object_datatype: dt.map(|d| format!("http://www.w3.org/2001/XMLSchema#t{d}")),
                };
                if ocs.is_empty() && dts.is_empty() {
                    rows.push(row(None, None));
                }
                rows.extend(ocs.iter().map(|o| row(Some(*o), None)));
                rows.extend(dts.iter().map(|d| row(None, Some(*d))));
            }
        }
        rows
    })
}

/// Folded canonical rows.
pub fn schema() -> impl Strategy<Value = VoidSchema> {
    canonical_rows().prop_map(|rows| fold_void_rows(&rows))
}

/// Like [`schema`], with every object class also present as a class.
pub fn closed_schema() -> impl Strategy<Value = VoidSchema> {
    schema().prop_map(|mut schema| {
        let classes: Vec<String> = schema.classes.keys().cloned().collect();
        for class in schema.classes.values_mut() {
            for pred in class.predicates.values_mut() {
                pred.object_classes.retain(|c| classes.contains(c));
            }
        }
        schema
    })
}
