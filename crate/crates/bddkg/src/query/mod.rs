//! Basic graph pattern matching and CONSTRUCT over in-memory graphs.
//!
//! Evaluation is left-to-right with binding propagation; model graphs are
//! small (hundreds of triples), so correctness and deterministic ordering
//! are the contract, not join performance.

mod text;

pub use text::{parse_query, Query};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::kg::{Graph, Iri, Term, Triple};

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("literal {literal} cannot occupy {position} position")]
    MalformedPattern { literal: String, position: &'static str },
    #[error("template variable ?{name} is not bound by the WHERE patterns")]
    UnboundTemplateVariable { name: String },
    #[error("query parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Kg(#[from] crate::kg::KgError),
}

/// A variable or a constant term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PatternTerm {
    Variable(String),
    Constant(Term),
}

impl PatternTerm {
    pub fn var(name: impl Into<String>) -> Self {
        PatternTerm::Variable(name.into())
    }

    pub fn iri(iri: Iri) -> Self {
        PatternTerm::Constant(Term::Iri(iri))
    }
}

/// One triple pattern; subjects and predicates are IRIs or variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(
        subject: PatternTerm,
        predicate: PatternTerm,
        object: PatternTerm,
    ) -> Result<Self, QueryError> {
        for (term, position) in [(&subject, "subject"), (&predicate, "predicate")] {
            if let PatternTerm::Constant(c) = term {
                if !matches!(c, Term::Iri(_)) {
                    return Err(QueryError::MalformedPattern {
                        literal: c.to_string(),
                        position,
                    });
                }
            }
        }
        Ok(TriplePattern { subject, predicate, object })
    }

    fn variables(&self) -> impl Iterator<Item = &str> {
        [&self.subject, &self.predicate, &self.object]
            .into_iter()
            .filter_map(|t| match t {
                PatternTerm::Variable(name) => Some(name.as_str()),
                PatternTerm::Constant(_) => None,
            })
    }
}

/// A solution mapping variable names to terms.
pub type Binding = BTreeMap<String, Term>;

/// All bindings under which every pattern instantiates to a graph triple.
/// The empty conjunction yields exactly one empty binding. Results are
/// normalized: sorted by the bound terms in variable-name order, so the
/// output does not depend on pattern order.
pub fn match_bgp(graph: &Graph, patterns: &[TriplePattern]) -> Vec<Binding> {
    let mut solutions = vec![Binding::new()];
    for pattern in patterns {
        let mut next = Vec::new();
        for binding in &solutions {
            extend_matches(graph, pattern, binding, &mut next);
        }
        solutions = next;
        if solutions.is_empty() {
            break;
        }
    }
    solutions.sort();
    solutions.dedup();
    solutions
}

fn extend_matches(graph: &Graph, pattern: &TriplePattern, binding: &Binding, out: &mut Vec<Binding>) {
    for triple in graph.iter() {
        let mut extended = binding.clone();
        if unify(&pattern.subject, &Term::Iri(triple.subject.clone()), &mut extended)
            && unify(&pattern.predicate, &Term::Iri(triple.predicate.clone()), &mut extended)
            && unify(&pattern.object, &triple.object, &mut extended)
        {
            out.push(extended);
        }
    }
}

/// Matches a pattern position against a concrete term, binding fresh
/// variables and requiring repeated ones to agree.
fn unify(pt: &PatternTerm, value: &Term, binding: &mut Binding) -> bool {
    match pt {
        PatternTerm::Constant(c) => c == value,
        PatternTerm::Variable(name) => match binding.get(name) {
            Some(existing) => existing == value,
            None => {
                binding.insert(name.clone(), value.clone());
                true
            }
        },
    }
}

/// Instantiates the template for every WHERE solution and unions the
/// resulting triples. Instantiations that would put a literal in subject or
/// predicate position are skipped, mirroring CONSTRUCT semantics.
pub fn construct(
    graph: &Graph,
    template: &[TriplePattern],
    where_patterns: &[TriplePattern],
) -> Result<Graph, QueryError> {
    let mut where_vars: Vec<&str> = where_patterns.iter().flat_map(|p| p.variables()).collect();
    where_vars.sort_unstable();
    for pattern in template {
        for name in pattern.variables() {
            if where_vars.binary_search(&name).is_err() {
                return Err(QueryError::UnboundTemplateVariable { name: name.to_string() });
            }
        }
    }

    let mut out = Graph::new();
    for binding in match_bgp(graph, where_patterns) {
        for pattern in template {
            let subject = match instantiate(&pattern.subject, &binding) {
                Term::Iri(iri) => iri,
                _ => continue,
            };
            let predicate = match instantiate(&pattern.predicate, &binding) {
                Term::Iri(iri) => iri,
                _ => continue,
            };
            let object = instantiate(&pattern.object, &binding);
            out.insert(Triple::new(subject, predicate, object));
        }
    }
    Ok(out)
}

fn instantiate(term: &PatternTerm, binding: &Binding) -> Term {
    match term {
        PatternTerm::Constant(c) => c.clone(),
        PatternTerm::Variable(name) => binding
            .get(name)
            .cloned()
            .expect("template variables are checked against WHERE"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::RDF_TYPE;
    use crate::vocab;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn clause_fixture() -> Graph {
        let mut g = Graph::new();
        for (clause, tc) in [("ex:c1", "ex:t1"), ("ex:c2", "ex:t2"), ("ex:c3", "ex:t3")] {
            g.insert(Triple::new(
                iri(clause),
                iri(RDF_TYPE),
                Term::Iri(vocab::fluent_clause()),
            ));
            g.insert(Triple::new(iri(clause), vocab::holds_at(), Term::iri(tc).unwrap()));
            g.insert(Triple::new(iri("ex:tmpl"), vocab::has_clause(), Term::iri(clause).unwrap()));
        }
        g
    }

    #[test]
    fn pairs_each_clause_with_its_time_constraint() {
        let g = clause_fixture();
        let patterns = vec![
            TriplePattern::new(
                PatternTerm::var("c"),
                PatternTerm::iri(iri(RDF_TYPE)),
                PatternTerm::Constant(Term::Iri(vocab::fluent_clause())),
            )
            .unwrap(),
            TriplePattern::new(
                PatternTerm::var("c"),
                PatternTerm::iri(vocab::holds_at()),
                PatternTerm::var("t"),
            )
            .unwrap(),
        ];
        let bindings = match_bgp(&g, &patterns);
        assert_eq!(bindings.len(), 3);
        assert_eq!(bindings[0]["c"], Term::iri("ex:c1").unwrap());
        assert_eq!(bindings[0]["t"], Term::iri("ex:t1").unwrap());
    }

    #[test]
    fn empty_pattern_list_yields_one_empty_binding() {
        let bindings = match_bgp(&clause_fixture(), &[]);
        assert_eq!(bindings, vec![Binding::new()]);
    }

    #[test]
    fn any_pattern_on_empty_graph_yields_nothing() {
        let patterns = vec![TriplePattern::new(
            PatternTerm::var("s"),
            PatternTerm::var("p"),
            PatternTerm::var("o"),
        )
        .unwrap()];
        assert!(match_bgp(&Graph::new(), &patterns).is_empty());
    }

    #[test]
    fn literal_subject_is_malformed() {
        let err = TriplePattern::new(
            PatternTerm::Constant(Term::Text("oops".into())),
            PatternTerm::var("p"),
            PatternTerm::var("o"),
        )
        .unwrap_err();
        assert!(matches!(err, QueryError::MalformedPattern { position: "subject", .. }));
    }

    #[test]
    fn repeated_variable_in_one_pattern_must_agree() {
        let mut g = Graph::new();
        g.insert(Triple::new(iri("ex:s"), iri("ex:p"), Term::iri("ex:o").unwrap()));
        g.insert(Triple::new(iri("ex:s"), iri("ex:q"), Term::iri("ex:q").unwrap()));
        let diagonal = TriplePattern::new(
            PatternTerm::var("s"),
            PatternTerm::var("x"),
            PatternTerm::var("x"),
        )
        .unwrap();
        let bindings = match_bgp(&g, &[diagonal]);
        assert_eq!(bindings.len(), 1, "only the q/q triple has predicate == object");
        assert_eq!(bindings[0]["x"], Term::iri("ex:q").unwrap());
    }

    #[test]
    fn result_is_independent_of_pattern_order() {
        let g = clause_fixture();
        let a = TriplePattern::new(
            PatternTerm::var("c"),
            PatternTerm::iri(vocab::holds_at()),
            PatternTerm::var("t"),
        )
        .unwrap();
        let b = TriplePattern::new(
            PatternTerm::iri(iri("ex:tmpl")),
            PatternTerm::iri(vocab::has_clause()),
            PatternTerm::var("c"),
        )
        .unwrap();
        let fwd = match_bgp(&g, &[a.clone(), b.clone()]);
        let rev = match_bgp(&g, &[b, a]);
        assert_eq!(fwd, rev);
    }

    #[test]
    fn construct_copies_the_matched_edges() {
        let g = clause_fixture();
        let tmpl_clause = TriplePattern::new(
            PatternTerm::var("tmpl"),
            PatternTerm::iri(vocab::has_clause()),
            PatternTerm::var("c"),
        )
        .unwrap();
        let clause_time = TriplePattern::new(
            PatternTerm::var("c"),
            PatternTerm::iri(vocab::holds_at()),
            PatternTerm::var("t"),
        )
        .unwrap();
        let template = vec![tmpl_clause.clone(), clause_time.clone()];
        let out = construct(&g, &template, &[tmpl_clause, clause_time]).unwrap();
        assert_eq!(out.len(), 6);
        for t in out.iter() {
            assert!(t.predicate == vocab::has_clause() || t.predicate == vocab::holds_at());
        }
    }

    #[test]
    fn construct_on_no_match_is_empty() {
        let template = vec![TriplePattern::new(
            PatternTerm::var("s"),
            PatternTerm::iri(iri("ex:p")),
            PatternTerm::var("s"),
        )
        .unwrap()];
        let wher = vec![TriplePattern::new(
            PatternTerm::var("s"),
            PatternTerm::iri(iri("ex:nope")),
            PatternTerm::var("s"),
        )
        .unwrap()];
        let out = construct(&clause_fixture(), &template, &wher).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn construct_rejects_unbound_template_variables() {
        let template = vec![TriplePattern::new(
            PatternTerm::var("ghost"),
            PatternTerm::iri(iri("ex:p")),
            PatternTerm::var("ghost"),
        )
        .unwrap()];
        let err = construct(&clause_fixture(), &template, &[]).unwrap_err();
        assert!(matches!(err, QueryError::UnboundTemplateVariable { name } if name == "ghost"));
    }
}
