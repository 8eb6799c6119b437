//! Cartesian expansion of a scenario variant into concrete instances.

use std::collections::BTreeMap;

use super::*;
use crate::kg::{Graph, Iri, Term};
use crate::vocab;

/// Expands one `bdd:ScenarioVariant` into the cartesian product of its task
/// variations. Variables and their admissible values are ordered by IRI, so
/// the resulting instance list is lexicographic and stable. A variable with
/// a single admissible value acts as the variant's fixed binding.
pub fn expand_variations(graph: &Graph, variant: &Iri) -> Result<Vec<ScenarioInstance>, CodegenError> {
    expand_variations_from(graph, variant, 0)
}

/// Like [`expand_variations`], but continues instance numbering at
/// `id_offset` so templates shared by several variants keep unique ids.
pub(crate) fn expand_variations_from(
    graph: &Graph,
    variant: &Iri,
    id_offset: usize,
) -> Result<Vec<ScenarioInstance>, CodegenError> {
    let template = iri_object(graph, variant, &vocab::of_template())?;
    let template_name = template.local_name().to_string();

    // Template variables, sorted by IRI.
    let variables = iri_objects(graph, &template, &vocab::has_variable());

    // Variable -> admissible values (sorted by IRI via objects_of).
    let mut values_of: BTreeMap<Iri, Vec<Iri>> = BTreeMap::new();
    for variation in iri_objects(graph, variant, &vocab::has_variation()) {
        let variable = iri_object(graph, &variation, &vocab::of_variable())?;
        let values = iri_objects(graph, &variation, &vocab::can_be());
        values_of.entry(variable).or_default().extend(values);
    }
    for values in values_of.values_mut() {
        values.sort();
        values.dedup();
    }

    let mut dimensions: Vec<(&Iri, &[Iri])> = Vec::new();
    for variable in &variables {
        match values_of.get(variable) {
            Some(values) if !values.is_empty() => dimensions.push((variable, values)),
            _ => {
                return Err(CodegenError::UnboundVariable {
                    variable: variable.clone(),
                    variant: variant.clone(),
                })
            }
        }
    }

    let total: usize = dimensions.iter().map(|(_, v)| v.len()).product();
    let width = std::cmp::max(2, (id_offset + total).saturating_sub(1).to_string().len());

    let (behaviour, events) = behaviour_of_template(graph, &template)?;
    let clause_templates = clause_templates(graph, &template)?;

    let mut instances = Vec::with_capacity(total);
    let mut odometer = vec![0usize; dimensions.len()];
    for n in 0..total {
        let mut bindings: BTreeMap<Iri, Iri> = BTreeMap::new();
        for (dim, &at) in dimensions.iter().zip(&odometer) {
            bindings.insert(dim.0.clone(), dim.1[at].clone());
        }

        let clauses = clause_templates
            .iter()
            .map(|ct| ct.bind(&bindings))
            .collect::<Result<Vec<_>, _>>()?;

        instances.push(ScenarioInstance {
            id: format!("{template_name}-{:0width$}", id_offset + n),
            variant: variant.clone(),
            bindings,
            clauses,
            behaviour: behaviour.clone(),
            events: events.clone(),
        });

        // Rightmost dimension varies fastest: lexicographic product order.
        for d in (0..dimensions.len()).rev() {
            odometer[d] += 1;
            if odometer[d] < dimensions[d].1.len() {
                break;
            }
            odometer[d] = 0;
        }
    }
    Ok(instances)
}

struct ClauseTemplate {
    section: Section,
    predicate: String,
    roles: Vec<(&'static str, Iri)>,
    timing: Timing,
}

impl ClauseTemplate {
    fn bind(&self, bindings: &BTreeMap<Iri, Iri>) -> Result<InstanceClause, CodegenError> {
        let mut roles = BTreeMap::new();
        for (role, variable) in &self.roles {
            let element = bindings.get(variable).ok_or_else(|| CodegenError::Model(format!(
                "clause role {role} references unbound variable {variable}"
            )))?;
            roles.insert(*role, element.clone());
        }
        Ok(InstanceClause {
            section: self.section,
            predicate: self.predicate.clone(),
            roles,
            timing: self.timing.clone(),
        })
    }
}

fn clause_templates(graph: &Graph, template: &Iri) -> Result<Vec<ClauseTemplate>, CodegenError> {
    let mut clauses: Vec<(f64, Iri)> = graph
        .objects_of(template, &vocab::has_clause())
        .into_iter()
        .filter_map(|t| match t {
            Term::Iri(iri) => Some(iri),
            _ => None,
        })
        .map(|c| (number_object(graph, &c, &vocab::order()).unwrap_or(f64::MAX), c))
        .collect();
    clauses.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    let mut out = Vec::new();
    for (_, clause) in clauses {
        let section_node = iri_object(graph, &clause, &vocab::clause_of())?;
        let section = if graph.has_type(&section_node, &vocab::given()) {
            Section::Given
        } else if graph.has_type(&section_node, &vocab::then()) {
            Section::Then
        } else {
            return Err(CodegenError::Model(format!(
                "{clause} is a clause of {section_node}, which is neither Given nor Then"
            )));
        };
        let predicate = iri_object(graph, &clause, &vocab::predicate())?.local_name().to_string();
        let mut roles = Vec::new();
        for (name, p) in [
            ("object", vocab::ref_object()),
            ("agent", vocab::ref_agent()),
            ("workspace", vocab::ref_workspace()),
        ] {
            if let Some(Term::Iri(variable)) = graph.object_of(&clause, &p) {
                roles.push((name, variable));
            }
        }
        let time = iri_object(graph, &clause, &vocab::holds_at())?;
        out.push(ClauseTemplate { section, predicate, roles, timing: timing_of(graph, &time)? });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{lower_to_graph, parse_bdd_dsl, parse_scene_dsl};

    fn fixture_graph(obj_count: usize, ws_count: usize, extra_dim: usize) -> (Graph, Iri) {
        let mut scene_src = String::new();
        for i in 0..obj_count.max(extra_dim) {
            scene_src.push_str(&format!(
                "Object obj{i} {{ mass_kg: 0.1 half_extents_m: 0.02 0.02 0.02 }}\n"
            ));
        }
        for i in 0..ws_count {
            scene_src.push_str(&format!(
                "Workspace bin{i} {{ aabb_m: 0.6 0.0 0 0.9 0.3 0.2 kind: bin bin_base_height_m: 0.2 }}\n"
            ));
        }
        scene_src.push_str("Workspace table { aabb_m: 0.2 -0.45 0 0.7 0.45 0.12 kind: table }\n");
        scene_src.push_str("Agent panda { ee: gripper }\n");
        let mut scene = parse_scene_dsl(&scene_src).unwrap();
        scene.name = "lab".into();

        let objs: Vec<String> = (0..obj_count).map(|i| format!("obj{i}")).collect();
        let bins: Vec<String> = (0..ws_count).map(|i| format!("bin{i}")).collect();
        let extras: Vec<String> = (0..extra_dim).map(|i| format!("obj{i}")).collect();
        let extra_line = if extra_dim > 0 {
            format!("    foreach extra in [{}]\n", extras.join(", "))
        } else {
            String::new()
        };
        let extra_var = if extra_dim > 0 { "  var extra\n" } else { "" };
        let model_src = format!(
            r#"
Event pickup_start
Event pickup_end
Template pick {{
  var obj
  var ws
  var bot
{extra_var}  Given:
    <IsLocatedAt>(object=obj, workspace=ws) before event pickup_start
  When:
    behaviour go emits pickup_start pickup_end
  Then:
    <IsHeldBy>(object=obj, agent=bot) after event pickup_end
}}
Story s {{
  Variant v {{
    template: pick
    scene: lab
    foreach obj in [{objs}]
    foreach ws in [{bins}]
    foreach bot in [panda]
{extra_line}  }}
}}
"#,
            objs = objs.join(", "),
            bins = bins.join(", "),
        );
        let model = parse_bdd_dsl(&model_src).unwrap();
        let ns = Iri::new("https://example.org/t").unwrap();
        let (graph, _) = lower_to_graph(&[model], &[scene], &ns).unwrap();
        let variant = Iri::new("https://example.org/t/variant/v").unwrap();
        (graph, variant)
    }

    #[test]
    fn seven_objects_times_two_bins_is_fourteen_instances() {
        let (graph, variant) = fixture_graph(7, 2, 0);
        let instances = expand_variations(&graph, &variant).unwrap();
        assert_eq!(instances.len(), 14);
        assert_eq!(instances[0].id, "pick-00");
        assert_eq!(instances[13].id, "pick-13");
    }

    #[test]
    fn singleton_variation_acts_as_fixed_binding() {
        let (graph, variant) = fixture_graph(1, 1, 0);
        let instances = expand_variations(&graph, &variant).unwrap();
        assert_eq!(instances.len(), 1);
    }

    #[test]
    fn product_3x2x2_is_twelve_in_lexicographic_order() {
        let (graph, variant) = fixture_graph(3, 2, 2);
        let instances = expand_variations(&graph, &variant).unwrap();
        assert_eq!(instances.len(), 12);
        // Variables sort as bot < extra < obj < ws; with bot fixed, the
        // rightmost dimension (ws) must vary fastest.
        let ws_var = Iri::new("https://example.org/t/variable/pick/ws").unwrap();
        let first = instances[0].bindings.get(&ws_var).unwrap().clone();
        let second = instances[1].bindings.get(&ws_var).unwrap().clone();
        assert_ne!(first, second);
        let tuples: Vec<Vec<&Iri>> = instances.iter().map(|i| i.bindings.values().collect()).collect();
        let mut sorted = tuples.clone();
        sorted.sort();
        assert_eq!(tuples, sorted, "instances are in lexicographic binding order");
    }

    #[test]
    fn missing_variation_is_unbound_variable() {
        let (graph, variant) = fixture_graph(2, 1, 0);
        // Strip the `bot` variation node and every edge touching it.
        let variation = Iri::new("https://example.org/t/variation/v/bot").unwrap();
        let stripped: Graph = graph
            .iter()
            .filter(|t| t.subject != variation && t.object != Term::Iri(variation.clone()))
            .cloned()
            .collect();
        let err = expand_variations(&stripped, &variant).unwrap_err();
        assert!(matches!(err, CodegenError::UnboundVariable { .. }));
    }

    #[test]
    fn instance_count_equals_product_of_dimension_sizes() {
        for (o, w) in [(1, 1), (2, 3), (5, 2)] {
            let (graph, variant) = fixture_graph(o, w, 0);
            assert_eq!(expand_variations(&graph, &variant).unwrap().len(), o * w);
        }
    }
}
