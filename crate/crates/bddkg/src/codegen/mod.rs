//! Generation stage: expand scenario variants into concrete instances and
//! emit Gherkin feature files plus the machine-readable manifest the
//! execution harness consumes.

mod expand;
mod gherkin;
mod manifest;

pub use expand::expand_variations;
pub use gherkin::{emit_gherkin, GherkinDocument, GherkinTable};
pub use manifest::{
    emit_manifest, CoordinationManifest, ElementConfig, ManifestClause, ManifestInstance,
    ManifestTiming,
};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::kg::{Graph, Iri, Term};
use crate::shapes::ValidationReport;
use crate::vocab;

#[derive(Debug, Error)]
pub enum CodegenError {
    #[error("graph does not conform to the builtin shapes:\n{0}")]
    NonConformingGraph(ValidationReport),
    #[error("variable {variable} of {variant} has neither a variation nor a fixed binding")]
    UnboundVariable { variable: Iri, variant: Iri },
    #[error("malformed model graph: {0}")]
    Model(String),
}

/// Given/Then section of a clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Given,
    Then,
}

impl Section {
    pub fn name(&self) -> &'static str {
        match self {
            Section::Given => "given",
            Section::Then => "then",
        }
    }
}

/// Resolved time constraint of one clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Timing {
    AfterEvent(Iri),
    BeforeEvent(Iri),
    During { start: Iri, end: Iri },
}

/// One clause of a concrete scenario, with roles bound to element IRIs.
#[derive(Debug, Clone)]
pub struct InstanceClause {
    pub section: Section,
    pub predicate: String,
    /// Role name (`object`, `agent`, `workspace`) to bound element.
    pub roles: BTreeMap<&'static str, Iri>,
    pub timing: Timing,
}

/// One fully bound scenario variation.
#[derive(Debug, Clone)]
pub struct ScenarioInstance {
    pub id: String,
    pub variant: Iri,
    /// Scenario variable to the element it is bound to.
    pub bindings: BTreeMap<Iri, Iri>,
    pub clauses: Vec<InstanceClause>,
    pub behaviour: Iri,
    /// Events the behaviour emits, in emission order.
    pub events: Vec<Iri>,
}

fn iri_object(graph: &Graph, s: &Iri, p: &Iri) -> Result<Iri, CodegenError> {
    match graph.object_of(s, p) {
        Some(Term::Iri(iri)) => Ok(iri),
        _ => Err(CodegenError::Model(format!("{s} is missing an IRI-valued {p}"))),
    }
}

fn iri_objects(graph: &Graph, s: &Iri, p: &Iri) -> Vec<Iri> {
    graph
        .objects_of(s, p)
        .into_iter()
        .filter_map(|t| match t {
            Term::Iri(iri) => Some(iri),
            _ => None,
        })
        .collect()
}

fn number_object(graph: &Graph, s: &Iri, p: &Iri) -> Option<f64> {
    match graph.object_of(s, p) {
        Some(Term::Number(n)) => Some(n),
        _ => None,
    }
}

fn text_object(graph: &Graph, s: &Iri, p: &Iri) -> Option<String> {
    match graph.object_of(s, p) {
        Some(Term::Text(s)) => Some(s),
        _ => None,
    }
}

/// Nodes of `class` that point at `target` via `p`, sorted by their
/// numeric `bdd:order` literal.
fn ordered_nodes(graph: &Graph, class: &Iri, p: &Iri, target: &Iri) -> Vec<Iri> {
    let mut nodes: Vec<(f64, Iri)> = graph
        .subjects_of(p, &Term::Iri(target.clone()))
        .into_iter()
        .filter(|n| graph.has_type(n, class))
        .map(|n| (number_object(graph, &n, &vocab::order()).unwrap_or(f64::MAX), n))
        .collect();
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    nodes.into_iter().map(|(_, n)| n).collect()
}

/// Behaviour of a template's scenario plus its emitted events in order.
fn behaviour_of_template(graph: &Graph, template: &Iri) -> Result<(Iri, Vec<Iri>), CodegenError> {
    let scenario = iri_object(graph, template, &vocab::of_scenario())?;
    let behaviour = iri_object(graph, &scenario, &vocab::of_behaviour())?;
    let emissions = ordered_nodes(graph, &vocab::behaviour_emission(), &vocab::of_behaviour(), &behaviour);
    let mut events = Vec::new();
    for emission in emissions {
        events.push(iri_object(graph, &emission, &vocab::ref_event())?);
    }
    Ok((behaviour, events))
}

/// Reads a clause's timing from its time-constraint node.
fn timing_of(graph: &Graph, time: &Iri) -> Result<Timing, CodegenError> {
    let kind = text_object(graph, time, &vocab::constraint_kind())
        .ok_or_else(|| CodegenError::Model(format!("{time} has no constraint-kind")))?;
    match kind.as_str() {
        vocab::KIND_AFTER_EVENT => Ok(Timing::AfterEvent(iri_object(graph, time, &vocab::ref_event())?)),
        vocab::KIND_BEFORE_EVENT => Ok(Timing::BeforeEvent(iri_object(graph, time, &vocab::ref_event())?)),
        vocab::KIND_DURING => Ok(Timing::During {
            start: iri_object(graph, time, &vocab::ref_event_start())?,
            end: iri_object(graph, time, &vocab::ref_event_end())?,
        }),
        other => Err(CodegenError::Model(format!("{time} has unknown constraint-kind {other:?}"))),
    }
}
