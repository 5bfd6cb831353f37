use crate::syntax::KeywordSet;

const QUERY: &[&str] = &["ASK", "BASE", "CONSTRUCT", "DESCRIBE", "PREFIX", "SELECT"];
const PROJECTION: &[&str] = &["DISTINCT", "FROM", "REDUCED", "WHERE"];
const DATASET: &[&str] = &["FROM", "WHERE"];
const NAMED: &[&str] = &["NAMED"];
const PATTERN: &[&str] = &["BIND", "FILTER", "GRAPH", "MINUS", "OPTIONAL", "SERVICE", "UNION", "VALUES"];
const MODIFIERS: &[&str] = &["GROUP", "HAVING", "LIMIT", "OFFSET", "ORDER", "VALUES"];

/// Keywords offered for a keyword set, sorted.
pub fn keywords_for(set: KeywordSet) -> &'static [&'static str] {
    match set {
        KeywordSet::Query => QUERY,
        KeywordSet::Projection => PROJECTION,
        KeywordSet::Dataset => DATASET,
        KeywordSet::Named => NAMED,
        KeywordSet::Pattern => PATTERN,
        KeywordSet::Modifiers => MODIFIERS,
        KeywordSet::None => &[],
    }
}
