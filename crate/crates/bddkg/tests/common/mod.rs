//! Shared helpers for the integration and acceptance suites.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use bddkg::dsl::{load_project, Project};
use bddkg::kg::{Graph, Iri, Term};
use bddkg::query::{match_bgp, Binding, PatternTerm, TriplePattern};

pub fn fixture_path(relative: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(relative)
}

pub fn read_fixture(relative: &str) -> String {
    let path = fixture_path(relative);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

pub fn pickplace_project() -> Project {
    load_project(&fixture_path("fixtures/pickplace/pickplace.bdd"), None).expect("fixture loads")
}

pub fn validation_project() -> Project {
    load_project(&fixture_path("fixtures/validation/all.bdd"), None).expect("fixture loads")
}

/// Compare against a recorded golden file. Set `BDDKG_BLESS=1` to record.
pub fn assert_golden(relative: &str, actual: &str) {
    let path = fixture_path(relative);
    if std::env::var_os("BDDKG_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap_or_else(|e| panic!("bless {}: {e}", path.display()));
        return;
    }
    let expected = read_fixture(relative);
    assert_eq!(actual, expected, "{relative} differs from the recorded golden file");
}

/// Reference BGP matcher: enumerate every assignment of the query's
/// variables over all terms of the graph and keep those under which each
/// pattern instantiates to a graph triple. Exponential, only for small
/// graphs; deliberately independent of the production join code.
pub fn brute_force_bgp(graph: &Graph, patterns: &[TriplePattern]) -> Vec<Binding> {
    let mut universe: BTreeSet<Term> = BTreeSet::new();
    for triple in graph.iter() {
        universe.insert(Term::Iri(triple.subject.clone()));
        universe.insert(Term::Iri(triple.predicate.clone()));
        universe.insert(triple.object.clone());
    }
    let universe: Vec<Term> = universe.into_iter().collect();

    let mut variables: BTreeSet<String> = BTreeSet::new();
    for pattern in patterns {
        for term in [&pattern.subject, &pattern.predicate, &pattern.object] {
            if let PatternTerm::Variable(name) = term {
                variables.insert(name.clone());
            }
        }
    }
    let variables: Vec<String> = variables.into_iter().collect();
    if !variables.is_empty() && universe.is_empty() {
        return Vec::new();
    }

    let mut solutions = Vec::new();
    let mut assignment = vec![0usize; variables.len()];
    loop {
        let binding: Binding = variables
            .iter()
            .zip(&assignment)
            .map(|(name, &i)| (name.clone(), universe[i].clone()))
            .collect();
        if patterns.iter().all(|p| instantiates(graph, p, &binding)) {
            solutions.push(binding);
        }
        // Odometer over the universe; empty variable set tries the single
        // empty assignment once.
        let mut advanced = false;
        for slot in assignment.iter_mut().rev() {
            *slot += 1;
            if *slot < universe.len() {
                advanced = true;
                break;
            }
            *slot = 0;
        }
        if !advanced {
            break;
        }
    }
    solutions.sort();
    solutions.dedup();
    solutions
}

fn instantiates(graph: &Graph, pattern: &TriplePattern, binding: &Binding) -> bool {
    let resolve = |t: &PatternTerm| -> Term {
        match t {
            PatternTerm::Constant(c) => c.clone(),
            PatternTerm::Variable(name) => binding[name].clone(),
        }
    };
    let subject = match resolve(&pattern.subject) {
        Term::Iri(iri) => iri,
        _ => return false,
    };
    let predicate = match resolve(&pattern.predicate) {
        Term::Iri(iri) => iri,
        _ => return false,
    };
    let object = resolve(&pattern.object);
    graph.contains(&bddkg::kg::Triple::new(subject, predicate, object))
}

/// Bindings restricted to the pattern variables match `match_bgp` output
/// exactly when both sides are sorted sets; convenience assert.
pub fn assert_matches_oracle(graph: &Graph, patterns: &[TriplePattern]) {
    let actual = match_bgp(graph, patterns);
    let expected = brute_force_bgp(graph, patterns);
    assert_eq!(actual, expected, "match_bgp disagrees with the brute-force oracle");
}

pub fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}
