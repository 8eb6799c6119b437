use std::collections::BTreeMap;

use super::{Iri, KgError};

/// Prefix and term mappings used to expand tokens into IRIs and to compact
/// IRIs back into CURIEs or term names.
///
/// A token with a `:` whose prefix is undeclared is only accepted as an
/// absolute IRI when it is clearly not a CURIE: hierarchical (`scheme://…`)
/// or a URN. Everything else reports `UnknownPrefix`, which is what catches
/// typo'd prefixes in documents.
#[derive(Debug, Clone, Default)]
pub struct PrefixContext {
    prefixes: BTreeMap<String, String>,
    terms: BTreeMap<String, TermDef>,
}

#[derive(Debug, Clone)]
struct TermDef {
    iri: Iri,
    id_coerced: bool,
}

impl PrefixContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_prefix(&mut self, prefix: &str, namespace: &str) -> Result<(), KgError> {
        if prefix.is_empty() || prefix.contains(':') {
            return Err(KgError::InvalidPrefix {
                prefix: prefix.into(),
                why: "prefix names must be non-empty and colon-free".into(),
            });
        }
        if namespace.is_empty() {
            return Err(KgError::InvalidPrefix {
                prefix: prefix.into(),
                why: "namespace must not be empty".into(),
            });
        }
        Iri::new(namespace)?;
        self.prefixes.insert(prefix.to_string(), namespace.to_string());
        Ok(())
    }

    /// Declares a term alias; `id_coerced` marks values of this key as IRIs.
    pub fn add_term(&mut self, name: &str, iri: Iri, id_coerced: bool) {
        self.terms.insert(name.to_string(), TermDef { iri, id_coerced });
    }

    pub fn prefixes(&self) -> impl Iterator<Item = (&str, &str)> {
        self.prefixes.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &Iri, bool)> {
        self.terms.iter().map(|(k, v)| (k.as_str(), &v.iri, v.id_coerced))
    }

    pub fn is_id_coerced(&self, token: &str) -> bool {
        self.terms.get(token).map(|d| d.id_coerced).unwrap_or(false)
    }

    /// Expands a term name, CURIE, or absolute IRI into an absolute IRI.
    pub fn expand(&self, token: &str) -> Result<Iri, KgError> {
        if let Some(def) = self.terms.get(token) {
            return Ok(def.iri.clone());
        }
        if let Some((prefix, suffix)) = token.split_once(':') {
            if let Some(ns) = self.prefixes.get(prefix) {
                return Iri::new(format!("{ns}{suffix}"));
            }
            if !prefix.is_empty() && (suffix.starts_with("//") || prefix == "urn") {
                return Iri::new(token);
            }
        }
        Err(KgError::UnknownPrefix { token: token.into() })
    }

    /// Compacts an IRI to `prefix:suffix` using the longest matching
    /// namespace, or returns the absolute form.
    pub fn compact(&self, iri: &Iri) -> String {
        let s = iri.as_str();
        let mut best: Option<(&str, &str)> = None;
        for (prefix, ns) in &self.prefixes {
            if s.starts_with(ns.as_str()) && best.map(|(_, b)| ns.len() > b.len()).unwrap_or(true) {
                best = Some((prefix, ns));
            }
        }
        match best {
            Some((prefix, ns)) => format!("{prefix}:{}", &s[ns.len()..]),
            None => s.to_string(),
        }
    }

    /// Term name for a predicate IRI whose coercion flag matches, if any.
    pub(crate) fn term_for(&self, iri: &Iri, id_coerced: bool) -> Option<&str> {
        self.terms
            .iter()
            .find(|(_, d)| &d.iri == iri && d.id_coerced == id_coerced)
            .map(|(name, _)| name.as_str())
    }
}
