//! Gherkin feature emission. Output is plain Cucumber syntax with the
//! expansion already applied: one `Scenario` per instance, no outlines.

use super::expand::expand_variations_from;
use super::*;
use crate::kg::{fmt_number, PrefixContext};
use crate::shapes::{builtin_bdd_shapes, validate};
use crate::vocab;

#[derive(Debug, Clone, PartialEq)]
pub struct GherkinTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GherkinDocument {
    pub feature: String,
    /// Background steps, each introducing one table.
    pub background: Vec<(String, GherkinTable)>,
    /// Scenario title plus its step lines.
    pub scenarios: Vec<(String, Vec<String>)>,
}

impl GherkinDocument {
    /// Renders the document with 2-space block indentation and aligned
    /// table pipes; rendering the same document twice is byte-identical.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("Feature: {}\n", self.feature));
        if !self.background.is_empty() {
            out.push_str("\n  Background:\n");
            for (step, table) in &self.background {
                out.push_str(&format!("    {step}\n"));
                render_table(&mut out, table);
            }
        }
        for (title, steps) in &self.scenarios {
            out.push_str(&format!("\n  Scenario: {title}\n"));
            for step in steps {
                out.push_str(&format!("    {step}\n"));
            }
        }
        out
    }
}

fn render_table(out: &mut String, table: &GherkinTable) {
    let mut widths: Vec<usize> = table.columns.iter().map(String::len).collect();
    for row in &table.rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let render_row = |cells: &[String]| -> String {
        let padded: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{c:<width$}", width = widths[i]))
            .collect();
        format!("      | {} |\n", padded.join(" | "))
    };
    out.push_str(&render_row(&table.columns));
    for row in &table.rows {
        out.push_str(&render_row(row));
    }
}

/// Emits the feature document for one user story. Refuses graphs that do
/// not conform to the builtin shapes.
pub fn emit_gherkin(
    graph: &Graph,
    ctx: &PrefixContext,
    story: &Iri,
) -> Result<GherkinDocument, CodegenError> {
    let report = validate(graph, &builtin_bdd_shapes());
    if !report.conforms() {
        return Err(CodegenError::NonConformingGraph(report));
    }
    let instances = story_instances(graph, story)?;
    let scenes = story_scenes(graph, story)?;

    let mut objects = Vec::new();
    let mut agents = Vec::new();
    let mut workspaces = Vec::new();
    for scene in &scenes {
        collect_scene_elements(graph, scene, &mut objects, &mut agents, &mut workspaces);
    }
    objects.sort();
    agents.sort();
    workspaces.sort();

    let mut background = Vec::new();
    if !objects.is_empty() {
        let rows = objects
            .iter()
            .map(|o| {
                vec![
                    ctx.compact(o),
                    fmt_number(number_object(graph, o, &vocab::mass_kg()).unwrap_or(0.0) * 1000.0),
                    fmt_number(number_object(graph, o, &vocab::half_extent_x()).unwrap_or(0.0)),
                    fmt_number(number_object(graph, o, &vocab::half_extent_y()).unwrap_or(0.0)),
                    fmt_number(number_object(graph, o, &vocab::half_extent_z()).unwrap_or(0.0)),
                ]
            })
            .collect();
        background.push((
            "Given a set of objects".to_string(),
            GherkinTable {
                columns: ["ID", "Mass_g", "Hx_m", "Hy_m", "Hz_m"].map(String::from).to_vec(),
                rows,
            },
        ));
    }
    if !agents.is_empty() {
        let rows = agents
            .iter()
            .map(|a| {
                vec![
                    ctx.compact(a),
                    text_object(graph, a, &vocab::ee_kind()).unwrap_or_default(),
                ]
            })
            .collect();
        let step = if background.is_empty() { "Given a set of agents" } else { "And a set of agents" };
        background.push((
            step.to_string(),
            GherkinTable { columns: ["ID", "EE"].map(String::from).to_vec(), rows },
        ));
    }
    if !workspaces.is_empty() {
        let rows = workspaces
            .iter()
            .map(|w| {
                let num = |p: &Iri| fmt_number(number_object(graph, w, p).unwrap_or(0.0));
                vec![
                    ctx.compact(w),
                    text_object(graph, w, &vocab::workspace_kind()).unwrap_or_default(),
                    num(&vocab::aabb_min_x()),
                    num(&vocab::aabb_min_y()),
                    num(&vocab::aabb_min_z()),
                    num(&vocab::aabb_max_x()),
                    num(&vocab::aabb_max_y()),
                    num(&vocab::aabb_max_z()),
                    number_object(graph, w, &vocab::bin_base_height_m())
                        .map(fmt_number)
                        .unwrap_or_else(|| "-".to_string()),
                ]
            })
            .collect();
        let step = if background.is_empty() {
            "Given a set of workspaces"
        } else {
            "And a set of workspaces"
        };
        background.push((
            step.to_string(),
            GherkinTable {
                columns: [
                    "ID", "Kind", "MinX_m", "MinY_m", "MinZ_m", "MaxX_m", "MaxY_m", "MaxZ_m",
                    "BinBase_m",
                ]
                .map(String::from)
                .to_vec(),
                rows,
            },
        ));
    }

    let scenarios = instances
        .iter()
        .map(|instance| (instance.id.clone(), scenario_steps(instance, ctx)))
        .collect();

    Ok(GherkinDocument {
        feature: story.local_name().to_string(),
        background,
        scenarios,
    })
}

/// All instances of a story, expanding each variant; instance ids continue
/// per template across variants so they stay unique within the story.
pub(crate) fn story_instances(graph: &Graph, story: &Iri) -> Result<Vec<ScenarioInstance>, CodegenError> {
    let variants = iri_objects(graph, story, &vocab::has_variant());
    if variants.is_empty() {
        return Err(CodegenError::Model(format!("{story} has no variants")));
    }
    let mut next_index: std::collections::BTreeMap<Iri, usize> = std::collections::BTreeMap::new();
    let mut instances = Vec::new();
    for variant in variants {
        let template = iri_object(graph, &variant, &vocab::of_template())?;
        let offset = next_index.entry(template).or_insert(0);
        let batch = expand_variations_from(graph, &variant, *offset)?;
        *offset += batch.len();
        instances.extend(batch);
    }
    Ok(instances)
}

pub(crate) fn story_scenes(graph: &Graph, story: &Iri) -> Result<Vec<Iri>, CodegenError> {
    let mut scenes = Vec::new();
    for variant in iri_objects(graph, story, &vocab::has_variant()) {
        let template = iri_object(graph, &variant, &vocab::of_template())?;
        let scene = iri_object(graph, &template, &vocab::has_scene())?;
        if !scenes.contains(&scene) {
            scenes.push(scene);
        }
    }
    scenes.sort();
    Ok(scenes)
}

fn collect_scene_elements(
    graph: &Graph,
    scene: &Iri,
    objects: &mut Vec<Iri>,
    agents: &mut Vec<Iri>,
    workspaces: &mut Vec<Iri>,
) {
    for relation in graph.subjects_of(&vocab::of_scene(), &crate::kg::Term::Iri(scene.clone())) {
        let Ok(element) = iri_object(graph, &relation, &vocab::ref_element()) else {
            continue;
        };
        if graph.has_type(&relation, &vocab::scene_has_object()) {
            objects.push(element);
        } else if graph.has_type(&relation, &vocab::scene_has_agent()) {
            agents.push(element);
        } else if graph.has_type(&relation, &vocab::scene_has_workspace()) {
            workspaces.push(element);
        }
    }
}

/// Fixed step-sentence table, one row per predicate. Adding a predicate
/// means one row here and one evaluator in the harness.
fn sentence(clause: &InstanceClause, ctx: &PrefixContext) -> String {
    let role = |name: &str| {
        clause
            .roles
            .get(name)
            .map(|iri| ctx.compact(iri))
            .unwrap_or_else(|| "?".to_string())
    };
    match clause.predicate.as_str() {
        "IsLocatedAt" => format!("\"{}\" is located at \"{}\"", role("object"), role("workspace")),
        "IsHeldBy" => format!("\"{}\" is held by \"{}\"", role("object"), role("agent")),
        "DoesNotCollide" => format!("\"{}\" does not collide \"{}\"", role("agent"), role("workspace")),
        other => format!("\"{other}\" holds"),
    }
}

fn scenario_steps(instance: &ScenarioInstance, ctx: &PrefixContext) -> Vec<String> {
    let mut steps = Vec::new();
    let mut given_seen = false;
    for clause in instance.clauses.iter().filter(|c| c.section == Section::Given) {
        let keyword = if given_seen { "And" } else { "Given" };
        given_seen = true;
        steps.push(format!("{keyword} {}", sentence(clause, ctx)));
    }

    // The acting agent shown in the When step is the first agent-role
    // binding in clause order.
    let agent = instance
        .clauses
        .iter()
        .find_map(|c| c.roles.get("agent"))
        .map(|iri| ctx.compact(iri));
    let behaviour = ctx.compact(&instance.behaviour);
    match agent {
        Some(agent) => steps.push(format!("When \"{agent}\" executes \"{behaviour}\"")),
        None => steps.push(format!("When the system executes \"{behaviour}\"")),
    }

    let mut then_seen = false;
    for clause in instance.clauses.iter().filter(|c| c.section == Section::Then) {
        let keyword = if then_seen { "And" } else { "Then" };
        then_seen = true;
        steps.push(format!("{keyword} {}", sentence(clause, ctx)));
    }
    steps
}
