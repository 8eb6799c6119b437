//! The normative shape set for BDD model graphs: one shape per concrete
//! metamodel concept the DSL can emit, eleven in total.
//!
//! Conditional requirements that the flat constraint language cannot state
//! (a time constraint of kind `after-event` needs `ref-event`, a `during`
//! needs start and end; every clause carries at least one role edge) are
//! guaranteed by DSL lowering and re-checked by the harness, so the shapes
//! list those properties as optional with cardinality at most one.

use super::{PropertyConstraint, Shape, ValueKind};
use crate::vocab;

/// Version tag for the embedded shape set.
pub const BDD_SHAPES_VERSION: &str = "1";

fn exactly_one(path: crate::kg::Iri, kind: ValueKind) -> PropertyConstraint {
    PropertyConstraint::new(path, 1, Some(1), kind)
}

fn at_most_one(path: crate::kg::Iri, kind: ValueKind) -> PropertyConstraint {
    PropertyConstraint::new(path, 0, Some(1), kind)
}

fn at_least_one(path: crate::kg::Iri, kind: ValueKind) -> PropertyConstraint {
    PropertyConstraint::new(path, 1, None, kind)
}

/// The builtin shapes, in a fixed order.
pub fn builtin_bdd_shapes() -> Vec<Shape> {
    vec![
        Shape::new(
            vocab::scenario(),
            vec![
                exactly_one(vocab::has_given(), ValueKind::IriOfClass(vocab::given())),
                exactly_one(vocab::has_when(), ValueKind::IriOfClass(vocab::when())),
                exactly_one(vocab::has_then(), ValueKind::IriOfClass(vocab::then())),
                exactly_one(vocab::of_behaviour(), ValueKind::IriOfClass(vocab::behaviour())),
            ],
        ),
        Shape::new(
            vocab::fluent_clause(),
            vec![
                // The target is a Given or a Then node; the union cannot be
                // stated as a single class, lowering guarantees it.
                exactly_one(vocab::clause_of(), ValueKind::AnyIri),
                exactly_one(vocab::predicate(), ValueKind::AnyIri),
                exactly_one(vocab::holds_at(), ValueKind::IriOfClass(vocab::time_constraint())),
                at_most_one(vocab::ref_object(), ValueKind::IriOfClass(vocab::scenario_variable())),
                at_most_one(vocab::ref_agent(), ValueKind::IriOfClass(vocab::scenario_variable())),
                at_most_one(vocab::ref_workspace(), ValueKind::IriOfClass(vocab::scenario_variable())),
            ],
        ),
        Shape::new(
            vocab::time_constraint(),
            vec![
                exactly_one(vocab::constraint_kind(), ValueKind::Text),
                at_most_one(vocab::ref_event(), ValueKind::IriOfClass(vocab::event())),
                at_most_one(vocab::ref_event_start(), ValueKind::IriOfClass(vocab::event())),
                at_most_one(vocab::ref_event_end(), ValueKind::IriOfClass(vocab::event())),
            ],
        ),
        Shape::new(
            vocab::task_variation(),
            vec![
                exactly_one(vocab::of_task(), ValueKind::IriOfClass(vocab::task())),
                exactly_one(vocab::of_variable(), ValueKind::IriOfClass(vocab::scenario_variable())),
                at_least_one(vocab::can_be(), ValueKind::AnyIri),
            ],
        ),
        // A scene itself carries no mandatory properties; its element
        // relations are reified as the three edge-node shapes below.
        Shape::new(vocab::scene(), vec![]),
        Shape::new(
            vocab::scene_has_object(),
            vec![
                exactly_one(vocab::of_scene(), ValueKind::IriOfClass(vocab::scene())),
                exactly_one(vocab::ref_element(), ValueKind::IriOfClass(vocab::scene_object())),
            ],
        ),
        Shape::new(
            vocab::scene_has_agent(),
            vec![
                exactly_one(vocab::of_scene(), ValueKind::IriOfClass(vocab::scene())),
                exactly_one(vocab::ref_element(), ValueKind::IriOfClass(vocab::agent())),
            ],
        ),
        Shape::new(
            vocab::scene_has_workspace(),
            vec![
                exactly_one(vocab::of_scene(), ValueKind::IriOfClass(vocab::scene())),
                exactly_one(vocab::ref_element(), ValueKind::IriOfClass(vocab::workspace())),
            ],
        ),
        Shape::new(
            vocab::scenario_template(),
            vec![
                exactly_one(vocab::of_scenario(), ValueKind::IriOfClass(vocab::scenario())),
                exactly_one(vocab::has_scene(), ValueKind::IriOfClass(vocab::scene())),
                at_least_one(vocab::has_clause(), ValueKind::IriOfClass(vocab::fluent_clause())),
            ],
        ),
        Shape::new(
            vocab::scenario_variant(),
            vec![
                exactly_one(vocab::of_template(), ValueKind::IriOfClass(vocab::scenario_template())),
                PropertyConstraint::new(
                    vocab::has_variation(),
                    0,
                    None,
                    ValueKind::IriOfClass(vocab::task_variation()),
                ),
            ],
        ),
        Shape::new(
            vocab::user_story(),
            vec![at_least_one(vocab::has_variant(), ValueKind::IriOfClass(vocab::scenario_variant()))],
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab;

    #[test]
    fn there_are_eleven_shapes() {
        assert_eq!(builtin_bdd_shapes().len(), 11);
    }

    #[test]
    fn fluent_clause_requires_one_time_constraint() {
        let shapes = builtin_bdd_shapes();
        let clause = shapes
            .iter()
            .find(|s| s.target_class == vocab::fluent_clause())
            .unwrap();
        let holds_at = clause
            .constraints
            .iter()
            .find(|c| c.path == vocab::holds_at())
            .unwrap();
        assert_eq!(holds_at.min_count, 1);
        assert_eq!(holds_at.max_count, Some(1));
        assert_eq!(holds_at.value_kind, ValueKind::IriOfClass(vocab::time_constraint()));
    }

    #[test]
    fn variant_requires_exactly_one_template() {
        let shapes = builtin_bdd_shapes();
        let variant = shapes
            .iter()
            .find(|s| s.target_class == vocab::scenario_variant())
            .unwrap();
        let of_template = variant
            .constraints
            .iter()
            .find(|c| c.path == vocab::of_template())
            .unwrap();
        assert_eq!((of_template.min_count, of_template.max_count), (1, Some(1)));
    }
}
