use serde::Serialize;

use crate::syntax::PrefixMap;

/// Text to insert at the start of the document (a PREFIX declaration).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdditionalEdit {
    pub text: String,
    pub line: u32,
    pub column: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rendered {
    pub insert_text: String,
    pub edit: Option<AdditionalEdit>,
}

/// Renders `iri` for insertion: a declared prefix wins, then a well-known
/// prefix whose label is not declared (adding its declaration), then `<iri>`.
pub fn render_iri(iri: &str, declared: &PrefixMap, well_known: &PrefixMap) -> Rendered {
    if let Some((label, local)) = declared.compact(iri) {
        return Rendered { insert_text: format!("{label}:{local}"), edit: None };
    }
    if let Some((label, local)) = usable_well_known(declared, well_known).compact(iri) {
        let namespace = well_known.namespace(label).expect("label comes from the map");
        return Rendered {
            insert_text: format!("{label}:{local}"),
            edit: Some(AdditionalEdit { text: format!("PREFIX {label}: <{namespace}>\n"), line: 1, column: 1 }),
        };
    }
    Rendered { insert_text: format!("<{}>", escape_iri(iri)), edit: None }
}

/// Well-known entries whose label is free in the document.
pub fn usable_well_known(declared: &PrefixMap, well_known: &PrefixMap) -> PrefixMap {
    well_known
        .iter()
        .filter(|(label, _)| declared.namespace(label).is_none())
        .map(|(l, n)| (l.to_string(), n.to_string()))
        .collect()
}

/// Percent-encodes characters that cannot appear inside `<...>`.
fn escape_iri(iri: &str) -> String {
    let mut out = String::with_capacity(iri.len());
    for c in iri.chars() {
        if c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') {
            let mut buf = [0u8; 4];
            for b in c.encode_utf8(&mut buf).bytes() {
                out.push_str(&format!("%{b:02X}"));
            }
        } else {
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{tokenize, TokenKind};

    const UP: &str = "http://purl.uniprot.org/core/";

    fn map(entries: &[(&str, &str)]) -> PrefixMap {
        entries.iter().map(|(l, n)| (l.to_string(), n.to_string())).collect()
    }

    #[test]
    fn declared_prefix() {
        let r = render_iri(&format!("{UP}scientificName"), &map(&[("up", UP)]), &PrefixMap::new());
        assert_eq!(r, Rendered { insert_text: "up:scientificName".into(), edit: None });
    }

    #[test]
    fn well_known_prefix_adds_declaration() {
        let r = render_iri(&format!("{UP}scientificName"), &PrefixMap::new(), &map(&[("up", UP)]));
        assert_eq!(r.insert_text, "up:scientificName");
        let edit = r.edit.unwrap();
        assert_eq!(edit.text, format!("PREFIX up: <{UP}>\n"));
        assert_eq!((edit.line, edit.column), (1, 1));
    }

    #[test]
    fn declared_label_blocks_well_known() {
        let r = render_iri(&format!("{UP}x"), &map(&[("up", "http://other/")]), &map(&[("up", UP)]));
        assert_eq!(r.insert_text, format!("<{UP}x>"));
    }

    #[test]
    fn unknown_namespace() {
        let r = render_iri("http://other.example/p", &PrefixMap::new(), &map(&[("up", UP)]));
        assert_eq!(r, Rendered { insert_text: "<http://other.example/p>".into(), edit: None });
    }

    #[test]
    fn awkward_iris_stay_single_tokens() {
        let r = render_iri("http://e/a b>c", &PrefixMap::new(), &PrefixMap::new());
        assert_eq!(r.insert_text, "<http://e/a%20b%3Ec>");
        let toks = tokenize(&r.insert_text);
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].kind, TokenKind::Iri);
    }
}
