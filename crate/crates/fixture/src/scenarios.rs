//! Canned endpoint contents shared by tests, the acceptance suite and demos.

use sparql_assist_core::client::{RdfTerm, ResultSet};
use sparql_assist_core::metadata::TemplateId;

use crate::dataset::XSD_STRING;
use crate::{FixtureEndpoint, FixtureError};

pub const UP: &str = "http://purl.uniprot.org/core/";
const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";

fn n(v: u64) -> RdfTerm {
    RdfTerm::typed(v.to_string(), XSD_INTEGER)
}

fn void_row(
    rs: ResultSet,
    class: &str,
    entities: u64,
    prop: &str,
    triples: u64,
    extra: Option<(&'static str, &str)>,
) -> ResultSet {
    let base = [
        ("subjectClass", RdfTerm::iri(format!("{UP}{class}"))),
        ("entities", n(entities)),
        ("prop", RdfTerm::iri(format!("{UP}{prop}"))),
        ("triples", n(triples)),
    ];
    rs.with_row(base.into_iter().chain(extra.map(|(var, iri)| (var, RdfTerm::iri(iri)))))
}

fn void_vars() -> ResultSet {
    ResultSet::new(["subjectClass", "entities", "prop", "triples", "objectClass", "objectDatatype"])
}

/// One class, `up:Taxon`, with `up:scientificName` (900 triples, strings)
/// and `up:rank` (500 triples, no object partition).
pub fn taxon_void() -> ResultSet {
    let rs = void_row(void_vars(), "Taxon", 300, "scientificName", 900, Some(("objectDatatype", XSD_STRING)));
    void_row(rs, "Taxon", 300, "rank", 500, None)
}

/// [`taxon_void`] plus `up:Protein` with `up:mnemonic`.
pub fn taxon_protein_void() -> ResultSet {
    let mut rs = taxon_void();
    rs = void_row(rs, "Protein", 200, "mnemonic", 700, Some(("objectDatatype", XSD_STRING)));
    rs
}

/// (id, form property, query, description)
pub const EXAMPLES: [(&str, &str, &str, &str); 5] = [
    (
        "http://example.org/examples/1",
        "select",
        "PREFIX up: <http://purl.uniprot.org/core/>\nSELECT ?taxon ?name WHERE { ?taxon a up:Taxon ; up:scientificName ?name }",
        "List all taxa with their scientific name",
    ),
    (
        "http://example.org/examples/2",
        "select",
        "PREFIX up: <http://purl.uniprot.org/core/>\nSELECT (COUNT(?p) AS ?n) WHERE { ?p a up:Protein }",
        "Count proteins",
    ),
    (
        "http://example.org/examples/3",
        "construct",
        "PREFIX up: <http://purl.uniprot.org/core/>\nCONSTRUCT { ?t up:rank ?r } WHERE { ?t a up:Taxon ; up:rank ?r }",
        "Extract the rank of every taxon as a graph",
    ),
    (
        "http://example.org/examples/4",
        "ask",
        "PREFIX up: <http://purl.uniprot.org/core/>\nASK { ?p up:mnemonic \"INS_HUMAN\" }",
        "Is there a protein with mnemonic INS_HUMAN?",
    ),
    (
        "http://example.org/examples/5",
        "describe",
        "DESCRIBE <http://purl.uniprot.org/taxonomy/9606>",
        "Describe the human taxonomy entry",
    ),
];

/// Answer to the examples query for [`EXAMPLES`].
pub fn five_examples() -> ResultSet {
    EXAMPLES.iter().fold(ResultSet::new(["ex", "q1", "q2", "q3", "q4", "c"]), |rs, (id, form, query, comment)| {
        let var = match *form {
            "select" => "q1",
            "construct" => "q2",
            "ask" => "q3",
            _ => "q4",
        };
        rs.with_row([("ex", RdfTerm::iri(*id)), (var, RdfTerm::literal(*query)), ("c", RdfTerm::literal(*comment))])
    })
}

impl FixtureEndpoint {
    /// An endpoint publishing [`taxon_void`] and [`five_examples`].
    pub async fn taxon() -> std::io::Result<Self> {
        let fixture = Self::start().await?;
        fixture.register_template(TemplateId::Void, &taxon_void()).map_err(into_io)?;
        fixture.register_template(TemplateId::Examples, &five_examples()).map_err(into_io)?;
        Ok(fixture)
    }
}

fn into_io(e: FixtureError) -> std::io::Error {
    std::io::Error::other(e)
}
