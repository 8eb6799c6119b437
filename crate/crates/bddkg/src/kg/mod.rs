//! Knowledge-graph core: IRIs, terms, triples, and an in-memory triple set
//! with deterministic ordering, plus a JSON-LD subset reader/writer.

mod context;
mod jsonld;

pub use context::PrefixContext;
pub use jsonld::{parse_graph, parse_jsonld, serialize_jsonld};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// `rdf:type`.
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
/// The RDF namespace.
pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";

#[derive(Debug, Error)]
pub enum KgError {
    #[error("JSON syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("node object at {path} has no @id")]
    MissingId { path: String },
    #[error("unknown prefix or term in {token:?}")]
    UnknownPrefix { token: String },
    #[error("invalid IRI {value:?}: {why}")]
    InvalidIri { value: String, why: String },
    #[error("malformed document at {path}: {what}")]
    Malformed { path: String, what: String },
    #[error("invalid prefix mapping {prefix:?}: {why}")]
    InvalidPrefix { prefix: String, why: String },
}

/// An absolute IRI. Equality is exact string equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(String);

impl Iri {
    /// Validates that the string has a non-empty scheme before the first `:`.
    pub fn new(value: impl Into<String>) -> Result<Self, KgError> {
        let value = value.into();
        if value.is_empty() {
            return Err(KgError::InvalidIri { value, why: "empty".into() });
        }
        match value.find(':') {
            Some(0) => Err(KgError::InvalidIri { value, why: "empty scheme".into() }),
            Some(_) => Ok(Iri(value)),
            None => Err(KgError::InvalidIri { value, why: "no scheme separator".into() }),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The last path or fragment segment, used to recover DSL-level names.
    pub fn local_name(&self) -> &str {
        let s = &self.0;
        let cut = s.rfind(['#', '/']).map(|i| i + 1).unwrap_or(0);
        &s[cut..]
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Object position of a triple: an IRI or a literal.
///
/// Ordering is total and deterministic: IRIs sort before literals, then
/// text < number < boolean, each by its natural order. Numbers use
/// `f64::total_cmp`, so graphs containing them still have a stable order.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Iri(Iri),
    Text(String),
    Number(f64),
    Boolean(bool),
}

impl Term {
    pub fn iri(value: &str) -> Result<Self, KgError> {
        Ok(Term::Iri(Iri::new(value)?))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Term::Iri(_) => 0,
            Term::Text(_) => 1,
            Term::Number(_) => 2,
            Term::Boolean(_) => 3,
        }
    }
}

impl Eq for Term {}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use Term::*;
        match (self, other) {
            (Iri(a), Iri(b)) => a.cmp(b),
            (Text(a), Text(b)) => a.cmp(b),
            (Number(a), Number(b)) => a.total_cmp(b),
            (Boolean(a), Boolean(b)) => a.cmp(b),
            (a, b) => a.rank().cmp(&b.rank()),
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::hash::Hash for Term {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Term::Iri(iri) => iri.hash(state),
            Term::Text(s) => s.hash(state),
            Term::Number(n) => n.to_bits().hash(state),
            Term::Boolean(b) => b.hash(state),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Text(s) => write!(f, "{s:?}"),
            Term::Number(n) => f.write_str(&fmt_number(*n)),
            Term::Boolean(b) => write!(f, "{b}"),
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

/// Canonical textual form for numeric literals: integral values up to 2^53
/// print without a fraction, everything else uses the shortest float form.
pub fn fmt_number(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() <= 9.007_199_254_740_992e15 {
        format!("{}", n as i64)
    } else {
        let mut buf = ryu_format(n);
        if buf.ends_with(".0") {
            buf.truncate(buf.len() - 2);
        }
        buf
    }
}

fn ryu_format(n: f64) -> String {
    // serde_json's float formatting (ryu) is the canonical form used in all
    // emitted documents; reuse it so text and JSON outputs agree.
    serde_json::Number::from_f64(n)
        .map(|v| v.to_string())
        .unwrap_or_else(|| n.to_string())
}

/// Subject and predicate are always IRIs; blank nodes are not representable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple { subject, predicate, object: object.into() }
    }
}

/// A set of triples. Insertion is idempotent; iteration order is the
/// (subject, predicate, object) total order, so everything derived from a
/// graph walk is deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    triples: BTreeSet<Triple>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns true when the triple was not already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        self.triples.remove(triple)
    }

    /// Moves all triples of `other` into `self`.
    pub fn merge(&mut self, other: Graph) {
        self.triples.extend(other.triples);
    }

    /// All objects of `(s, p, ·)` triples, in term order.
    pub fn objects_of(&self, s: &Iri, p: &Iri) -> Vec<Term> {
        self.iter()
            .filter(|t| &t.subject == s && &t.predicate == p)
            .map(|t| t.object.clone())
            .collect()
    }

    /// First object of `(s, p, ·)` in term order, if any.
    pub fn object_of(&self, s: &Iri, p: &Iri) -> Option<Term> {
        self.objects_of(s, p).into_iter().next()
    }

    /// All `rdf:type` objects of a node.
    pub fn types_of(&self, s: &Iri) -> Vec<Iri> {
        let rdf_type = Iri::new(RDF_TYPE).expect("constant");
        self.objects_of(s, &rdf_type)
            .into_iter()
            .filter_map(|t| match t {
                Term::Iri(iri) => Some(iri),
                _ => None,
            })
            .collect()
    }

    pub fn has_type(&self, s: &Iri, class: &Iri) -> bool {
        self.types_of(s).iter().any(|t| t == class)
    }

    /// All subjects carrying `rdf:type = class`, in IRI order.
    pub fn nodes_of_type(&self, class: &Iri) -> Vec<Iri> {
        let rdf_type = Iri::new(RDF_TYPE).expect("constant");
        let mut out: Vec<Iri> = self
            .iter()
            .filter(|t| t.predicate == rdf_type && t.object == Term::Iri(class.clone()))
            .map(|t| t.subject.clone())
            .collect();
        out.dedup();
        out
    }

    /// All distinct subject IRIs, in order.
    pub fn subjects(&self) -> Vec<Iri> {
        let mut out: Vec<Iri> = self.iter().map(|t| t.subject.clone()).collect();
        out.dedup();
        out
    }

    /// All subjects of `(·, p, o)` triples, in IRI order.
    pub fn subjects_of(&self, p: &Iri, o: &Term) -> Vec<Iri> {
        let mut out: Vec<Iri> = self
            .iter()
            .filter(|t| &t.predicate == p && &t.object == o)
            .map(|t| t.subject.clone())
            .collect();
        out.dedup();
        out
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Graph { triples: iter.into_iter().collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn iri_requires_scheme() {
        assert!(Iri::new("https://a.b/c#d").is_ok());
        assert!(Iri::new("urn:x").is_ok());
        assert!(Iri::new("").is_err());
        assert!(Iri::new("no-scheme").is_err());
        assert!(Iri::new(":empty-scheme").is_err());
    }

    #[test]
    fn literals_never_equal_iris() {
        let t = Term::Text("https://a.b/c".into());
        let i = Term::iri("https://a.b/c").unwrap();
        assert_ne!(t, i);
        assert!(i < t, "IRIs sort before literals");
    }

    #[test]
    fn insertion_is_idempotent() {
        let mut g = Graph::new();
        let t = Triple::new(iri("ex:s"), iri("ex:p"), Term::Text("v".into()));
        assert!(g.insert(t.clone()));
        assert!(!g.insert(t));
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn objects_of_sorted_and_empty_when_absent() {
        let mut g = Graph::new();
        let s = iri("ex:s");
        let p = iri("ex:p");
        g.insert(Triple::new(s.clone(), p.clone(), Term::iri("ex:zz").unwrap()));
        g.insert(Triple::new(s.clone(), p.clone(), Term::iri("ex:aa").unwrap()));
        g.insert(Triple::new(s.clone(), p.clone(), Term::Text("txt".into())));
        let objs = g.objects_of(&s, &p);
        assert_eq!(objs.len(), 3);
        assert_eq!(objs[0], Term::iri("ex:aa").unwrap());
        assert_eq!(objs[1], Term::iri("ex:zz").unwrap());
        assert_eq!(objs[2], Term::Text("txt".into()));

        assert!(Graph::new().objects_of(&s, &p).is_empty());
    }

    #[test]
    fn number_formatting_is_canonical() {
        assert_eq!(fmt_number(100.0), "100");
        assert_eq!(fmt_number(0.1), "0.1");
        assert_eq!(fmt_number(-3.0), "-3");
        assert_eq!(fmt_number(0.25), "0.25");
    }

    #[test]
    fn local_name_takes_last_segment() {
        assert_eq!(iri("https://a.b/c#d").local_name(), "d");
        assert_eq!(iri("https://a.b/c/d").local_name(), "d");
        assert_eq!(iri("urn:x").local_name(), "urn:x");
    }
}
