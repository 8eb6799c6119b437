//! Shapes as graphs, so shape sets can ship in `.jsonld` files using the
//! same subset as every other model document.

use thiserror::Error;

use super::{PropertyConstraint, Shape, ValueKind};
use crate::kg::{Graph, Iri, Term, Triple, RDF_TYPE};

const SHAPE_NS: &str = "https://my.url/metamodels/shape#";

fn shv(local: &str) -> Iri {
    Iri::new(format!("{SHAPE_NS}{local}")).expect("shape vocabulary IRI")
}

#[derive(Debug, Error)]
pub enum ShapeLoadError {
    #[error("shape {shape} is missing {what}")]
    Missing { shape: Iri, what: String },
    #[error("shape {shape}: {what}")]
    Invalid { shape: Iri, what: String },
}

/// Reads every `shape:Shape` node of the graph into a [`Shape`].
pub fn load_shapes(graph: &Graph) -> Result<Vec<Shape>, ShapeLoadError> {
    let mut shapes = Vec::new();
    for node in graph.nodes_of_type(&shv("Shape")) {
        let target = iri_object(graph, &node, &shv("targetClass")).ok_or_else(|| {
            ShapeLoadError::Missing { shape: node.clone(), what: "targetClass".into() }
        })?;
        let mut constraints = Vec::new();
        for prop in graph.objects_of(&node, &shv("property")) {
            let Term::Iri(prop) = prop else {
                return Err(ShapeLoadError::Invalid {
                    shape: node.clone(),
                    what: "property must reference a constraint node".into(),
                });
            };
            constraints.push(load_constraint(graph, &node, &prop)?);
        }
        constraints.sort_by(|a, b| a.path.cmp(&b.path));
        shapes.push(Shape::new(target, constraints));
    }
    Ok(shapes)
}

fn load_constraint(graph: &Graph, shape: &Iri, node: &Iri) -> Result<PropertyConstraint, ShapeLoadError> {
    let path = iri_object(graph, node, &shv("path"))
        .ok_or_else(|| ShapeLoadError::Missing { shape: shape.clone(), what: format!("path on {node}") })?;
    let min_count = number_object(graph, node, &shv("minCount")).unwrap_or(0.0) as u32;
    let max_count = number_object(graph, node, &shv("maxCount")).map(|n| n as u32);
    let kind_text = match graph.object_of(node, &shv("valueKind")) {
        Some(Term::Text(s)) => s,
        _ => {
            return Err(ShapeLoadError::Missing { shape: shape.clone(), what: format!("valueKind on {node}") })
        }
    };
    let value_kind = match kind_text.as_str() {
        "text" => ValueKind::Text,
        "number" => ValueKind::Number,
        "boolean" => ValueKind::Boolean,
        "any-iri" => ValueKind::AnyIri,
        "iri-of-class" => {
            let class = iri_object(graph, node, &shv("valueClass")).ok_or_else(|| {
                ShapeLoadError::Missing { shape: shape.clone(), what: format!("valueClass on {node}") }
            })?;
            ValueKind::IriOfClass(class)
        }
        other => {
            return Err(ShapeLoadError::Invalid {
                shape: shape.clone(),
                what: format!("unknown valueKind {other:?}"),
            })
        }
    };
    if let Some(max) = max_count {
        if min_count > max {
            return Err(ShapeLoadError::Invalid {
                shape: shape.clone(),
                what: format!("minCount {min_count} exceeds maxCount {max} on {node}"),
            });
        }
    }
    Ok(PropertyConstraint { path, min_count, max_count, value_kind })
}

/// Writes shapes as a graph using the shape vocabulary; the inverse of
/// [`load_shapes`] up to constraint order.
pub fn shapes_to_graph(shapes: &[Shape]) -> Graph {
    let rdf_type = Iri::new(RDF_TYPE).expect("constant");
    let mut g = Graph::new();
    for shape in shapes {
        let shape_iri = Iri::new(format!("urn:shapes:{}", shape.target_class.local_name()))
            .expect("urn from local name");
        g.insert(Triple::new(shape_iri.clone(), rdf_type.clone(), Term::Iri(shv("Shape"))));
        g.insert(Triple::new(
            shape_iri.clone(),
            shv("targetClass"),
            Term::Iri(shape.target_class.clone()),
        ));
        for c in &shape.constraints {
            let c_iri = Iri::new(format!(
                "urn:shapes:{}:{}",
                shape.target_class.local_name(),
                c.path.local_name()
            ))
            .expect("urn from local names");
            g.insert(Triple::new(shape_iri.clone(), shv("property"), Term::Iri(c_iri.clone())));
            g.insert(Triple::new(c_iri.clone(), rdf_type.clone(), Term::Iri(shv("PropertyConstraint"))));
            g.insert(Triple::new(c_iri.clone(), shv("path"), Term::Iri(c.path.clone())));
            g.insert(Triple::new(c_iri.clone(), shv("minCount"), Term::Number(c.min_count as f64)));
            if let Some(max) = c.max_count {
                g.insert(Triple::new(c_iri.clone(), shv("maxCount"), Term::Number(max as f64)));
            }
            let (kind, class) = match &c.value_kind {
                ValueKind::Text => ("text", None),
                ValueKind::Number => ("number", None),
                ValueKind::Boolean => ("boolean", None),
                ValueKind::AnyIri => ("any-iri", None),
                ValueKind::IriOfClass(class) => ("iri-of-class", Some(class.clone())),
            };
            g.insert(Triple::new(c_iri.clone(), shv("valueKind"), Term::Text(kind.into())));
            if let Some(class) = class {
                g.insert(Triple::new(c_iri, shv("valueClass"), Term::Iri(class)));
            }
        }
    }
    g
}

fn iri_object(graph: &Graph, s: &Iri, p: &Iri) -> Option<Iri> {
    match graph.object_of(s, p) {
        Some(Term::Iri(iri)) => Some(iri),
        _ => None,
    }
}

fn number_object(graph: &Graph, s: &Iri, p: &Iri) -> Option<f64> {
    match graph.object_of(s, p) {
        Some(Term::Number(n)) => Some(n),
        _ => None,
    }
}
