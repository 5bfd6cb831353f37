use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::client::{RdfTerm, ResultSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemaSource {
    Void,
    Probed,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PredicateProfile {
    pub iri: String,
    pub triples: u64,
    pub object_classes: BTreeSet<String>,
    pub object_datatypes: BTreeSet<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassProfile {
    pub iri: String,
    pub instances: u64,
    /// Keyed by predicate IRI.
    pub predicates: BTreeMap<String, PredicateProfile>,
}

/// Classes and predicates of one endpoint, from VoID or from probing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VoidSchema {
    /// Keyed by class IRI.
    pub classes: BTreeMap<String, ClassProfile>,
    /// Predicates not tied to a class partition, with triple counts.
    pub global_predicates: BTreeMap<String, u64>,
    pub source: SchemaSource,
}

impl VoidSchema {
    pub fn empty(source: SchemaSource) -> Self {
        VoidSchema { classes: BTreeMap::new(), global_predicates: BTreeMap::new(), source }
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty() && self.global_predicates.is_empty()
    }

    /// Union of the predicate profiles of `classes`; score is the largest
    /// triple count seen for a predicate.
    pub fn predicates_of<'a>(&self, classes: impl IntoIterator<Item = &'a str>) -> BTreeMap<String, u64> {
        let mut out = BTreeMap::new();
        for class in classes {
            if let Some(profile) = self.classes.get(class) {
                for p in profile.predicates.values() {
                    merge_max(&mut out, &p.iri, p.triples);
                }
            }
        }
        out
    }

    /// Global predicates plus every class-attached predicate.
    pub fn all_predicates(&self) -> BTreeMap<String, u64> {
        let mut out = self.global_predicates.clone();
        for profile in self.classes.values() {
            for p in profile.predicates.values() {
                merge_max(&mut out, &p.iri, p.triples);
            }
        }
        out
    }

    pub fn predicate_count(&self) -> usize {
        self.all_predicates().len()
    }
}

fn merge_max(map: &mut BTreeMap<String, u64>, key: &str, value: u64) {
    let slot = map.entry(key.to_string()).or_insert(0);
    *slot = (*slot).max(value);
}

/// One answer row of the VoID extraction query.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VoidRow {
    pub class: String,
    pub entities: u64,
    pub predicate: String,
    pub triples: u64,
    pub object_class: Option<String>,
    pub object_datatype: Option<String>,
}

/// Rows lacking a class or predicate IRI are skipped.
pub fn void_rows(results: &ResultSet) -> Vec<VoidRow> {
    results
        .rows
        .iter()
        .filter_map(|row| {
            let iri = |var: &str| row.get(var).and_then(RdfTerm::as_iri).map(str::to_string);
            let count = |var: &str| row.get(var).and_then(RdfTerm::as_count).unwrap_or(0);
            Some(VoidRow {
                class: iri("subjectClass")?,
                entities: count("entities"),
                predicate: iri("prop")?,
                triples: count("triples"),
                object_class: iri("objectClass"),
                object_datatype: iri("objectDatatype"),
            })
        })
        .collect()
}

/// Folds VoID rows into class profiles. Repeated counts take the maximum.
pub fn fold_void_rows(rows: &[VoidRow]) -> VoidSchema {
    let mut schema = VoidSchema::empty(SchemaSource::Void);
    for row in rows {
        let class = schema
            .classes
            .entry(row.class.clone())
            .or_insert_with(|| ClassProfile { iri: row.class.clone(), ..Default::default() });
        class.instances = class.instances.max(row.entities);
        let pred = class
            .predicates
            .entry(row.predicate.clone())
            .or_insert_with(|| PredicateProfile { iri: row.predicate.clone(), ..Default::default() });
        pred.triples = pred.triples.max(row.triples);
        if let Some(c) = &row.object_class {
            pred.object_classes.insert(c.clone());
        }
        if let Some(d) = &row.object_datatype {
            pred.object_datatypes.insert(d.clone());
        }
    }
    schema
}

/// Inverse of [`fold_void_rows`] for canonical rows: one row per object class,
/// one per datatype, or a single row with neither.
pub fn flatten_void_schema(schema: &VoidSchema) -> Vec<VoidRow> {
    let mut rows = Vec::new();
    for class in schema.classes.values() {
        for pred in class.predicates.values() {
            let row = |object_class: Option<&String>, object_datatype: Option<&String>| VoidRow {
                class: class.iri.clone(),
                entities: class.instances,
                predicate: pred.iri.clone(),
                triples: pred.triples,
                object_class: object_class.cloned(),
                object_datatype: object_datatype.cloned(),
            };
            if pred.object_classes.is_empty() && pred.object_datatypes.is_empty() {
                rows.push(row(None, None));
            }
            rows.extend(pred.object_classes.iter().map(|c| row(Some(c), None)));
            rows.extend(pred.object_datatypes.iter().map(|d| row(None, Some(d))));
        }
    }
    rows
}

/// Probed schema: classes without predicates, every predicate global.
pub fn probed_schema(classes: &ResultSet, predicates: &ResultSet) -> VoidSchema {
    let mut schema = VoidSchema::empty(SchemaSource::Probed);
    for row in &classes.rows {
        if let Some(iri) = row.get("class").and_then(RdfTerm::as_iri) {
            let count = row.get("n").and_then(RdfTerm::as_count).unwrap_or(0);
            let class = schema
                .classes
                .entry(iri.to_string())
                .or_insert_with(|| ClassProfile { iri: iri.to_string(), ..Default::default() });
            class.instances = class.instances.max(count);
        }
    }
    for row in &predicates.rows {
        if let Some(iri) = row.get("p").and_then(RdfTerm::as_iri) {
            merge_max(&mut schema.global_predicates, iri, row.get("n").and_then(RdfTerm::as_count).unwrap_or(0));
        }
    }
    schema
}

#[cfg(test)]
mod tests {
    use super::*;

    const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";

    fn row(class: &str, entities: u64, pred: &str, triples: u64, oc: Option<&str>, dt: Option<&str>) -> VoidRow {
        VoidRow {
            class: class.into(),
            entities,
            predicate: pred.into(),
            triples,
            object_class: oc.map(Into::into),
            object_datatype: dt.map(Into::into),
        }
    }

    #[test]
    fn person_fold() {
        let rows = [
            row("http://ex/Person", 25, "http://ex/name", 100, None, Some(XSD_STRING)),
            row("http://ex/Person", 25, "http://ex/knows", 40, Some("http://ex/Person"), None),
        ];
        let schema = fold_void_rows(&rows);
        assert_eq!(schema.classes.len(), 1);
        let person = &schema.classes["http://ex/Person"];
        assert_eq!(person.instances, 25);
        assert_eq!(person.predicates.len(), 2);
        assert_eq!(person.predicates["http://ex/name"].triples, 100);
        assert!(person.predicates["http://ex/knows"].object_classes.contains("http://ex/Person"));
        let mut flat = flatten_void_schema(&schema);
        flat.sort();
        let mut expected = rows.to_vec();
        expected.sort();
        assert_eq!(flat, expected);
    }

    #[test]
    fn unbound_partitions_give_empty_sets() {
        let schema = fold_void_rows(&[row("http://ex/A", 1, "http://ex/p", 0, None, None)]);
        let p = &schema.classes["http://ex/A"].predicates["http://ex/p"];
        assert!(p.object_classes.is_empty() && p.object_datatypes.is_empty());
    }

    #[test]
    fn union_takes_max_score() {
        let schema = fold_void_rows(&[
            row("http://ex/A", 1, "http://ex/p", 5, None, None),
            row("http://ex/B", 1, "http://ex/p", 9, None, None),
            row("http://ex/B", 1, "http://ex/q", 2, None, None),
        ]);
        let union = schema.predicates_of(["http://ex/A", "http://ex/B", "http://ex/Missing"]);
        assert_eq!(union, BTreeMap::from([("http://ex/p".into(), 9), ("http://ex/q".into(), 2)]));
        assert_eq!(schema.predicates_of(["http://ex/A"]).len(), 1);
    }

    #[test]
    fn probe_fold() {
        let classes = ResultSet::new(["class", "n"])
            .with_row([("class", RdfTerm::iri("http://ex/A")), ("n", RdfTerm::literal("10"))])
            .with_row([("class", RdfTerm::iri("http://ex/B")), ("n", RdfTerm::literal("3"))]);
        let preds = ResultSet::new(["p", "n"])
            .with_row([("p", RdfTerm::iri("http://ex/p")), ("n", RdfTerm::literal("12"))])
            .with_row([("p", RdfTerm::iri(crate::syntax::RDF_TYPE)), ("n", RdfTerm::literal("13"))]);
        let schema = probed_schema(&classes, &preds);
        assert_eq!(schema.source, SchemaSource::Probed);
        assert_eq!(schema.classes.len(), 2);
        assert_eq!(schema.classes["http://ex/A"].instances, 10);
        assert!(schema.classes.values().all(|c| c.predicates.is_empty()));
        assert_eq!(schema.global_predicates.len(), 2);
        assert_eq!(schema.all_predicates()["http://ex/p"], 12);
    }
}
