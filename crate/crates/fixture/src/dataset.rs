//! A tiny in-memory triple set from which the fixture derives the answers a
//! real endpoint would give to the metadata queries. Counting happens here,
//! directly over triples, so tests can check the engine against it.

use std::collections::{BTreeMap, BTreeSet};

use sparql_assist_core::client::{RdfTerm, ResultSet};
use sparql_assist_core::metadata::TemplateId;
use sparql_assist_core::syntax::RDF_TYPE;

use crate::{FixtureEndpoint, FixtureError};

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Object {
    Iri(String),
    Literal { value: String, datatype: String },
}

impl Object {
    pub fn iri(v: impl Into<String>) -> Self {
        Object::Iri(v.into())
    }

    pub fn string(v: impl Into<String>) -> Self {
        Object::Literal { value: v.into(), datatype: XSD_STRING.into() }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Dataset {
    triples: BTreeSet<(String, String, Object)>,
}

fn count(n: usize) -> RdfTerm {
    RdfTerm::typed(n.to_string(), XSD_INTEGER)
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, s: &str, p: &str, o: Object) -> &mut Self {
        self.triples.insert((s.into(), p.into(), o));
        self
    }

    pub fn add_type(&mut self, s: &str, class: &str) -> &mut Self {
        self.add(s, RDF_TYPE, Object::iri(class))
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    fn types(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut out: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for (s, p, o) in &self.triples {
            if let (true, Object::Iri(c)) = (p == RDF_TYPE, o) {
                out.entry(s.as_str()).or_default().insert(c.as_str());
            }
        }
        out
    }

    /// Distinct objects of `rdf:type`.
    pub fn classes(&self) -> BTreeSet<String> {
        self.types().into_values().flatten().map(str::to_string).collect()
    }

    pub fn predicates(&self) -> BTreeSet<String> {
        self.triples.iter().map(|(_, p, _)| p.clone()).collect()
    }

    /// Answer to the VoID query: one row per (class, predicate) and object
    /// class or datatype.
    pub fn void_results(&self) -> ResultSet {
        let types = self.types();
        let mut out = ResultSet::new(["subjectClass", "entities", "prop", "triples", "objectClass", "objectDatatype"]);
        for class in self.classes() {
            let members: BTreeSet<&str> =
                types.iter().filter(|(_, cs)| cs.contains(class.as_str())).map(|(s, _)| *s).collect();
            let mut by_pred: BTreeMap<&str, (usize, BTreeSet<&str>, BTreeSet<&str>)> = BTreeMap::new();
            for (s, p, o) in &self.triples {
                if !members.contains(s.as_str()) {
                    continue;
                }
                let entry = by_pred.entry(p.as_str()).or_default();
                entry.0 += 1;
                match o {
                    Object::Iri(iri) => entry.1.extend(types.get(iri.as_str()).into_iter().flatten()),
                    Object::Literal { datatype, .. } => {
                        entry.2.insert(datatype.as_str());
                    }
                }
            }
            for (p, (n, object_classes, datatypes)) in by_pred {
                let base = [
                    ("subjectClass", RdfTerm::iri(&class)),
                    ("entities", count(members.len())),
                    ("prop", RdfTerm::iri(p)),
                    ("triples", count(n)),
                ];
                if object_classes.is_empty() && datatypes.is_empty() {
                    out = out.with_row(base.clone());
                }
                for c in object_classes {
                    out = out.with_row(base.iter().cloned().chain([("objectClass", RdfTerm::iri(c))]));
                }
                for d in datatypes {
                    out = out.with_row(base.iter().cloned().chain([("objectDatatype", RdfTerm::iri(d))]));
                }
            }
        }
        out
    }

    pub fn probe_classes_results(&self) -> ResultSet {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for (_, p, o) in &self.triples {
            if let (true, Object::Iri(c)) = (p == RDF_TYPE, o) {
                *counts.entry(c.as_str()).or_default() += 1;
            }
        }
        counts.into_iter().fold(ResultSet::new(["class", "n"]), |rs, (c, n)| {
            rs.with_row([("class", RdfTerm::iri(c)), ("n", count(n))])
        })
    }

    pub fn probe_predicates_results(&self) -> ResultSet {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for (_, p, _) in &self.triples {
            *counts.entry(p.as_str()).or_default() += 1;
        }
        counts
            .into_iter()
            .fold(ResultSet::new(["p", "n"]), |rs, (p, n)| rs.with_row([("p", RdfTerm::iri(p)), ("n", count(n))]))
    }

    pub fn distinct_classes_results(&self) -> ResultSet {
        self.classes().into_iter().fold(ResultSet::new(["class"]), |rs, c| rs.with_row([("class", RdfTerm::iri(c))]))
    }

    pub fn distinct_predicates_results(&self) -> ResultSet {
        self.predicates().into_iter().fold(ResultSet::new(["p"]), |rs, p| rs.with_row([("p", RdfTerm::iri(p))]))
    }

    pub fn register_void(&self, fixture: &FixtureEndpoint) -> Result<(), FixtureError> {
        fixture.register_template(TemplateId::Void, &self.void_results())
    }

    /// Registers the aggregate and DISTINCT probe answers.
    pub fn register_probes(&self, fixture: &FixtureEndpoint) -> Result<(), FixtureError> {
        fixture.register_template(TemplateId::ProbeClasses, &self.probe_classes_results())?;
        fixture.register_template(TemplateId::ProbePredicates, &self.probe_predicates_results())?;
        fixture.register_template(TemplateId::ProbeClassesDistinct, &self.distinct_classes_results())?;
        fixture.register_template(TemplateId::ProbePredicatesDistinct, &self.distinct_predicates_results())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn void_rows_by_hand() {
        let mut d = Dataset::new();
        d.add_type("http://ex/a", "http://ex/P")
            .add_type("http://ex/b", "http://ex/P")
            .add("http://ex/a", "http://ex/knows", Object::iri("http://ex/b"))
            .add("http://ex/a", "http://ex/name", Object::string("A"));
        let rs = d.void_results();
        // rdf:type (no typed objects), knows -> P, name -> xsd:string
        assert_eq!(rs.rows.len(), 3);
        let knows = rs.rows.iter().find(|r| r["prop"] == RdfTerm::iri("http://ex/knows")).unwrap();
        assert_eq!(knows["entities"].as_count(), Some(2));
        assert_eq!(knows["triples"].as_count(), Some(1));
        assert_eq!(knows["objectClass"], RdfTerm::iri("http://ex/P"));
        let ty = rs.rows.iter().find(|r| r["prop"] == RdfTerm::iri(RDF_TYPE)).unwrap();
        assert_eq!(ty["triples"].as_count(), Some(2));
        assert_eq!(d.classes().len(), 1);
        assert_eq!(d.probe_predicates_results().rows.len(), 3);
    }
}
