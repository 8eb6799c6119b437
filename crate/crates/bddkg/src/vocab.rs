//! The BDD metamodel vocabulary: class and predicate IRIs plus the default
//! prefix context every tool command starts from.

use crate::kg::{Iri, PrefixContext, RDF_NS};

/// Namespace of the BDD metamodel.
pub const BDD_NS: &str = "https://my.url/metamodels/bdd#";

macro_rules! vocab {
    ($($const_name:ident => $local:literal),+ $(,)?) => {
        $(pub fn $const_name() -> Iri {
            Iri::new(concat!("https://my.url/metamodels/bdd#", $local)).expect("vocabulary IRI")
        })+
    };
}

// Classes.
vocab! {
    scenario => "Scenario",
    given => "Given",
    when => "When",
    then => "Then",
    behaviour => "Behaviour",
    behaviour_emission => "BehaviourEmission",
    event => "Event",
    fluent_clause => "FluentClause",
    time_constraint => "TimeConstraint",
    scenario_variable => "ScenarioVariable",
    task => "Task",
    task_variation => "TaskVariation",
    scene => "Scene",
    scene_object => "SceneObject",
    agent => "Agent",
    workspace => "Workspace",
    scene_has_object => "SceneHasObject",
    scene_has_agent => "SceneHasAgent",
    scene_has_workspace => "SceneHasWorkspace",
    scenario_template => "ScenarioTemplate",
    scenario_variant => "ScenarioVariant",
    user_story => "UserStory",
}

// Predicate kinds carried by fluent clauses.
vocab! {
    is_located_at => "IsLocatedAt",
    is_held_by => "IsHeldBy",
    does_not_collide => "DoesNotCollide",
}

// Relations.
vocab! {
    has_given => "has-given",
    has_when => "has-when",
    has_then => "has-then",
    of_behaviour => "of-behaviour",
    ref_event => "ref-event",
    ref_event_start => "ref-event-start",
    ref_event_end => "ref-event-end",
    clause_of => "clause-of",
    predicate => "predicate",
    holds_at => "holds-at",
    ref_object => "ref-object",
    ref_agent => "ref-agent",
    ref_workspace => "ref-workspace",
    of_task => "of-task",
    of_variable => "of-variable",
    can_be => "can-be",
    of_scene => "of-scene",
    ref_element => "ref-element",
    of_scenario => "of-scenario",
    has_scene => "has-scene",
    has_clause => "has-clause",
    has_variable => "has-variable",
    of_template => "of-template",
    has_variation => "has-variation",
    has_variant => "has-variant",
}

// Literal-valued attributes.
vocab! {
    constraint_kind => "constraint-kind",
    order => "order",
    mass_kg => "mass-kg",
    half_extent_x => "half-extent-x",
    half_extent_y => "half-extent-y",
    half_extent_z => "half-extent-z",
    pos_min_x => "pos-min-x",
    pos_min_y => "pos-min-y",
    pos_max_x => "pos-max-x",
    pos_max_y => "pos-max-y",
    ee_kind => "ee-kind",
    workspace_kind => "workspace-kind",
    aabb_min_x => "aabb-min-x",
    aabb_min_y => "aabb-min-y",
    aabb_min_z => "aabb-min-z",
    aabb_max_x => "aabb-max-x",
    aabb_max_y => "aabb-max-y",
    aabb_max_z => "aabb-max-z",
    bin_base_height_m => "bin-base-height-m",
}

/// Time-constraint kind literals.
pub const KIND_AFTER_EVENT: &str = "after-event";
pub const KIND_BEFORE_EVENT: &str = "before-event";
pub const KIND_DURING: &str = "during";

type VocabEntry = (&'static str, fn() -> Iri);

const COERCED_TERMS: &[VocabEntry] = &[
    ("has-given", has_given),
    ("has-when", has_when),
    ("has-then", has_then),
    ("of-behaviour", of_behaviour),
    ("ref-event", ref_event),
    ("ref-event-start", ref_event_start),
    ("ref-event-end", ref_event_end),
    ("clause-of", clause_of),
    ("predicate", predicate),
    ("holds-at", holds_at),
    ("ref-object", ref_object),
    ("ref-agent", ref_agent),
    ("ref-workspace", ref_workspace),
    ("of-task", of_task),
    ("of-variable", of_variable),
    ("can-be", can_be),
    ("of-scene", of_scene),
    ("ref-element", ref_element),
    ("of-scenario", of_scenario),
    ("has-scene", has_scene),
    ("has-clause", has_clause),
    ("has-variable", has_variable),
    ("of-template", of_template),
    ("has-variation", has_variation),
    ("has-variant", has_variant),
];

/// Context with `rdf` and `bdd` prefixes plus id-coerced terms for every
/// relation of the metamodel, mirroring how model documents declare them.
pub fn default_context() -> PrefixContext {
    let mut ctx = PrefixContext::new();
    ctx.add_prefix("rdf", RDF_NS).expect("constant namespace");
    ctx.add_prefix("bdd", BDD_NS).expect("constant namespace");
    for (name, iri) in COERCED_TERMS {
        ctx.add_term(name, iri(), true);
    }
    ctx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_context_expands_metamodel_tokens() {
        let ctx = default_context();
        assert_eq!(
            ctx.expand("bdd:FluentClause").unwrap().as_str(),
            "https://my.url/metamodels/bdd#FluentClause"
        );
        assert_eq!(ctx.expand("clause-of").unwrap(), clause_of());
        assert!(ctx.is_id_coerced("holds-at"));
        assert!(!ctx.is_id_coerced("bdd:constraint-kind"));
    }
}
