use serde::{Deserialize, Serialize};

use super::token::{tokenize, TokenKind};

/// Prefix label to namespace IRI, plus an optional base. Re-declaring a label
/// replaces its namespace in place.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixMap {
    entries: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<String>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: impl Into<String>, namespace: impl Into<String>) {
        let label = label.into();
        let namespace = namespace.into();
        match self.entries.iter_mut().find(|(l, _)| *l == label) {
            Some(entry) => entry.1 = namespace,
            None => self.entries.push((label, namespace)),
        }
    }

    /// Adds every entry of `other` whose label is not yet present.
    pub fn extend_missing(&mut self, other: &PrefixMap) {
        for (label, ns) in other.iter() {
            if self.namespace(label).is_none() {
                self.insert(label, ns);
            }
        }
    }

    pub fn set_base(&mut self, base: impl Into<String>) {
        self.base = Some(base.into());
    }

    pub fn base(&self) -> Option<&str> {
        self.base.as_deref()
    }

    pub fn namespace(&self, label: &str) -> Option<&str> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, ns)| ns.as_str())
    }

    pub fn expand(&self, label: &str, local: &str) -> Option<String> {
        self.namespace(label).map(|ns| format!("{ns}{}", unescape_local(local)))
    }

    /// Compacts `iri` to `(label, local)` using the longest matching namespace
    /// whose remainder is a valid local name. Ties go to the smaller label.
    pub fn compact(&self, iri: &str) -> Option<(&str, String)> {
        self.entries
            .iter()
            .filter(|(_, ns)| !ns.is_empty() && iri.starts_with(ns.as_str()))
            .filter_map(|(label, ns)| {
                let local = &iri[ns.len()..];
                let rendered = format!("{label}:{local}");
                is_single_prefixed_name(&rendered).then_some((label.as_str(), ns.len(), local))
            })
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(label, _, local)| (label, local.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(l, n)| (l.as_str(), n.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(String, String)> for PrefixMap {
    fn from_iter<T: IntoIterator<Item = (String, String)>>(iter: T) -> Self {
        let mut map = PrefixMap::new();
        for (label, ns) in iter {
            map.insert(label, ns);
        }
        map
    }
}

pub(crate) fn is_single_prefixed_name(text: &str) -> bool {
    let tokens = tokenize(text);
    tokens.len() == 1 && tokens[0].kind == TokenKind::PrefixedName
}

/// Removes `\` escapes from a local name (`ex:a\,b` names `a,b`).
pub(crate) fn unescape_local(local: &str) -> String {
    let mut out = String::with_capacity(local.len());
    let mut chars = local.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            if let Some(next) = chars.next() {
                out.push(next);
            }
        } else {
            out.push(c);
        }
    }
    out
}
