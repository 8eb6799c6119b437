//! Structural validation of model graphs against a small shape language:
//! each shape targets a class and constrains property cardinality and
//! object kind, reporting one violation per breached (node, constraint).

mod builtin;
mod loader;

pub use builtin::{builtin_bdd_shapes, BDD_SHAPES_VERSION};
pub use loader::{load_shapes, shapes_to_graph};

use std::fmt;

use crate::kg::{Graph, Iri, Term};

/// What the objects of a constrained property must be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueKind {
    /// An IRI whose node carries `rdf:type` of the given class.
    IriOfClass(Iri),
    Text,
    Number,
    Boolean,
    AnyIri,
}

#[derive(Debug, Clone)]
pub struct PropertyConstraint {
    pub path: Iri,
    pub min_count: u32,
    /// `None` means unbounded.
    pub max_count: Option<u32>,
    pub value_kind: ValueKind,
}

impl PropertyConstraint {
    pub fn new(path: Iri, min_count: u32, max_count: Option<u32>, value_kind: ValueKind) -> Self {
        if let Some(max) = max_count {
            assert!(min_count <= max, "minCount must not exceed maxCount");
        }
        PropertyConstraint { path, min_count, max_count, value_kind }
    }
}

#[derive(Debug, Clone)]
pub struct Shape {
    pub target_class: Iri,
    pub constraints: Vec<PropertyConstraint>,
}

impl Shape {
    pub fn new(target_class: Iri, constraints: Vec<PropertyConstraint>) -> Self {
        let mut seen: Vec<&Iri> = Vec::new();
        for c in &constraints {
            assert!(!seen.contains(&&c.path), "duplicate constraint path {}", c.path);
            seen.push(&c.path);
        }
        Shape { target_class, constraints }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    TooFew,
    TooMany,
    WrongKind,
    WrongClass,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::TooFew => "too-few",
            ViolationKind::TooMany => "too-many",
            ViolationKind::WrongKind => "wrong-kind",
            ViolationKind::WrongClass => "wrong-class",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub focus: Iri,
    pub path: Iri,
    pub kind: ViolationKind,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn conforms(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conforms() {
            return writeln!(f, "conforms");
        }
        for v in &self.violations {
            writeln!(f, "{} {} {}: {}", v.kind, v.focus, v.path, v.message)?;
        }
        Ok(())
    }
}

/// Validates every node targeted by a shape. Structural problems are report
/// entries, never errors; the report is sorted by (focus, path, kind) so it
/// is independent of evaluation order.
pub fn validate(graph: &Graph, shapes: &[Shape]) -> ValidationReport {
    let mut violations = Vec::new();
    for shape in shapes {
        for focus in graph.nodes_of_type(&shape.target_class) {
            for constraint in &shape.constraints {
                check_constraint(graph, &focus, constraint, &mut violations);
            }
        }
    }
    violations.sort_by(|a, b| {
        (&a.focus, &a.path, a.kind, &a.message).cmp(&(&b.focus, &b.path, b.kind, &b.message))
    });
    ValidationReport { violations }
}

fn check_constraint(
    graph: &Graph,
    focus: &Iri,
    constraint: &PropertyConstraint,
    out: &mut Vec<Violation>,
) {
    let objects = graph.objects_of(focus, &constraint.path);
    let count = objects.len() as u32;

    if count < constraint.min_count {
        out.push(Violation {
            focus: focus.clone(),
            path: constraint.path.clone(),
            kind: ViolationKind::TooFew,
            message: format!("expected at least {}, found {count}", constraint.min_count),
        });
        return;
    }
    if let Some(max) = constraint.max_count {
        if count > max {
            out.push(Violation {
                focus: focus.clone(),
                path: constraint.path.clone(),
                kind: ViolationKind::TooMany,
                message: format!("expected at most {max}, found {count}"),
            });
            return;
        }
    }
    for object in &objects {
        if let Some(violation) = check_value(graph, focus, constraint, object) {
            out.push(violation);
            return; // one violation per breached (node, constraint)
        }
    }
}

fn check_value(
    graph: &Graph,
    focus: &Iri,
    constraint: &PropertyConstraint,
    object: &Term,
) -> Option<Violation> {
    let wrong_kind = |expected: &str| Violation {
        focus: focus.clone(),
        path: constraint.path.clone(),
        kind: ViolationKind::WrongKind,
        message: format!("expected {expected}, found {object}"),
    };
    match (&constraint.value_kind, object) {
        (ValueKind::AnyIri, Term::Iri(_)) => None,
        (ValueKind::AnyIri, _) => Some(wrong_kind("an IRI")),
        (ValueKind::Text, Term::Text(_)) => None,
        (ValueKind::Text, _) => Some(wrong_kind("a text literal")),
        (ValueKind::Number, Term::Number(_)) => None,
        (ValueKind::Number, _) => Some(wrong_kind("a number")),
        (ValueKind::Boolean, Term::Boolean(_)) => None,
        (ValueKind::Boolean, _) => Some(wrong_kind("a boolean")),
        (ValueKind::IriOfClass(class), Term::Iri(node)) => {
            if graph.has_type(node, class) {
                None
            } else {
                Some(Violation {
                    focus: focus.clone(),
                    path: constraint.path.clone(),
                    kind: ViolationKind::WrongClass,
                    message: format!("{node} is not a {class}"),
                })
            }
        }
        (ValueKind::IriOfClass(_), _) => Some(wrong_kind("an IRI")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{Triple, RDF_TYPE};

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn typed(g: &mut Graph, node: &str, class: &str) {
        g.insert(Triple::new(iri(node), iri(RDF_TYPE), Term::iri(class).unwrap()));
    }

    fn shape_one_ref() -> Shape {
        Shape::new(
            iri("ex:Thing"),
            vec![PropertyConstraint::new(
                iri("ex:ref"),
                1,
                Some(1),
                ValueKind::IriOfClass(iri("ex:Other")),
            )],
        )
    }

    #[test]
    fn empty_graph_conforms_vacuously() {
        let report = validate(&Graph::new(), &[shape_one_ref()]);
        assert!(report.conforms());
    }

    #[test]
    fn missing_mandatory_edge_is_too_few() {
        let mut g = Graph::new();
        typed(&mut g, "ex:a", "ex:Thing");
        let report = validate(&g, &[shape_one_ref()]);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ViolationKind::TooFew);
        assert_eq!(report.violations[0].path, iri("ex:ref"));
    }

    #[test]
    fn duplicate_max_one_edge_is_too_many() {
        let mut g = Graph::new();
        typed(&mut g, "ex:a", "ex:Thing");
        typed(&mut g, "ex:b", "ex:Other");
        typed(&mut g, "ex:c", "ex:Other");
        g.insert(Triple::new(iri("ex:a"), iri("ex:ref"), Term::iri("ex:b").unwrap()));
        g.insert(Triple::new(iri("ex:a"), iri("ex:ref"), Term::iri("ex:c").unwrap()));
        let report = validate(&g, &[shape_one_ref()]);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ViolationKind::TooMany);
    }

    #[test]
    fn object_with_wrong_class_is_reported() {
        let mut g = Graph::new();
        typed(&mut g, "ex:a", "ex:Thing");
        typed(&mut g, "ex:b", "ex:Unrelated");
        g.insert(Triple::new(iri("ex:a"), iri("ex:ref"), Term::iri("ex:b").unwrap()));
        let report = validate(&g, &[shape_one_ref()]);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ViolationKind::WrongClass);
    }

    #[test]
    fn literal_under_iri_constraint_is_wrong_kind() {
        let mut g = Graph::new();
        typed(&mut g, "ex:a", "ex:Thing");
        g.insert(Triple::new(iri("ex:a"), iri("ex:ref"), Term::Text("nope".into())));
        let report = validate(&g, &[shape_one_ref()]);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ViolationKind::WrongKind);
    }

    #[test]
    fn untargeted_nodes_never_change_conformance() {
        let mut g = Graph::new();
        typed(&mut g, "ex:a", "ex:Thing");
        typed(&mut g, "ex:b", "ex:Other");
        g.insert(Triple::new(iri("ex:a"), iri("ex:ref"), Term::iri("ex:b").unwrap()));
        let report = validate(&g, &[shape_one_ref()]);
        assert!(report.conforms());

        typed(&mut g, "ex:stranger", "ex:Unshaped");
        g.insert(Triple::new(iri("ex:stranger"), iri("ex:whatever"), Term::Number(1.0)));
        assert!(validate(&g, &[shape_one_ref()]).conforms());
    }
}
