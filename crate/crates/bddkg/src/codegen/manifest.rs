//! The coordination manifest: a JSON sidecar binding every generated
//! scenario's clauses, roles, and timing to graph IRIs so the harness never
//! parses Gherkin prose. IRIs are written in compact CURIE form and the
//! manifest carries the prefix map needed to expand them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::gherkin::{story_instances, story_scenes};
use super::*;
use crate::kg::PrefixContext;
use crate::shapes::{builtin_bdd_shapes, validate};
use crate::vocab;

// Struct fields are declared alphabetically: serde emits them in order and
// the output format promises sorted keys.

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CoordinationManifest {
    /// Prefix to namespace map for expanding the CURIEs below.
    pub context: BTreeMap<String, String>,
    pub instances: Vec<ManifestInstance>,
    pub story: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifestInstance {
    pub behaviour: String,
    /// Scenario variable CURIE to bound element CURIE.
    pub bindings: BTreeMap<String, String>,
    pub clauses: Vec<ManifestClause>,
    /// Per-element configuration for every element of the story's scenes.
    pub elements: BTreeMap<String, ElementConfig>,
    /// Events the behaviour emits, in emission order.
    pub events: Vec<String>,
    pub id: String,
    pub variant: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifestClause {
    pub predicate: String,
    /// Role name to bound element CURIE.
    pub roles: BTreeMap<String, String>,
    /// `given` or `then`.
    pub section: String,
    pub timing: ManifestTiming,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifestTiming {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event: Option<String>,
    /// `after-event`, `before-event`, or `during`.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct ElementConfig {
    /// Workspace AABB `[min_x, min_y, min_z, max_x, max_y, max_z]` in m.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aabb_m: Option<[f64; 6]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_base_height_m: Option<f64>,
    /// End-effector kind for agents: `gripper` or `suction`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ee: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_extents_m: Option<[f64; 3]>,
    /// Element kind: `object`, `agent`, or `workspace`.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_kg: Option<f64>,
    /// Initial-position sampling bounds `[[x_min, y_min], [x_max, y_max]]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position_range_m: Option<[[f64; 2]; 2]>,
    /// `table` or `bin` for workspaces.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workspace_kind: Option<String>,
}

impl CoordinationManifest {
    /// Pretty JSON with a trailing newline; stable across runs.
    pub fn to_json_string(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("manifest serializes");
        out.push('\n');
        out
    }

    pub fn from_json_str(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Expands a CURIE from the manifest's own context.
    pub fn expand(&self, token: &str) -> Option<String> {
        if let Some((prefix, suffix)) = token.split_once(':') {
            if let Some(ns) = self.context.get(prefix) {
                return Some(format!("{ns}{suffix}"));
            }
        }
        Some(token.to_string())
    }
}

/// Emits the manifest for one user story; refuses non-conforming graphs.
pub fn emit_manifest(
    graph: &Graph,
    ctx: &PrefixContext,
    story: &Iri,
) -> Result<CoordinationManifest, CodegenError> {
    let report = validate(graph, &builtin_bdd_shapes());
    if !report.conforms() {
        return Err(CodegenError::NonConformingGraph(report));
    }
    let instances = story_instances(graph, story)?;
    let scenes = story_scenes(graph, story)?;

    let mut elements: BTreeMap<String, ElementConfig> = BTreeMap::new();
    for scene in &scenes {
        for relation in graph.subjects_of(&vocab::of_scene(), &Term::Iri(scene.clone())) {
            let Ok(element) = iri_object(graph, &relation, &vocab::ref_element()) else {
                continue;
            };
            let config = if graph.has_type(&relation, &vocab::scene_has_object()) {
                object_config(graph, &element)
            } else if graph.has_type(&relation, &vocab::scene_has_agent()) {
                ElementConfig {
                    ee: text_object(graph, &element, &vocab::ee_kind()),
                    kind: "agent".into(),
                    ..Default::default()
                }
            } else if graph.has_type(&relation, &vocab::scene_has_workspace()) {
                workspace_config(graph, &element)
            } else {
                continue;
            };
            elements.insert(ctx.compact(&element), config);
        }
    }

    let manifest_instances = instances
        .iter()
        .map(|instance| ManifestInstance {
            behaviour: ctx.compact(&instance.behaviour),
            bindings: instance
                .bindings
                .iter()
                .map(|(var, element)| (ctx.compact(var), ctx.compact(element)))
                .collect(),
            clauses: instance
                .clauses
                .iter()
                .map(|clause| ManifestClause {
                    predicate: clause.predicate.clone(),
                    roles: clause
                        .roles
                        .iter()
                        .map(|(role, element)| (role.to_string(), ctx.compact(element)))
                        .collect(),
                    section: clause.section.name().to_string(),
                    timing: timing_record(&clause.timing, ctx),
                })
                .collect(),
            elements: elements.clone(),
            events: instance.events.iter().map(|e| ctx.compact(e)).collect(),
            id: instance.id.clone(),
            variant: ctx.compact(&instance.variant),
        })
        .collect();

    Ok(CoordinationManifest {
        context: ctx.prefixes().map(|(p, ns)| (p.to_string(), ns.to_string())).collect(),
        instances: manifest_instances,
        story: ctx.compact(story),
    })
}

fn timing_record(timing: &Timing, ctx: &PrefixContext) -> ManifestTiming {
    match timing {
        Timing::AfterEvent(event) => ManifestTiming {
            end: None,
            event: Some(ctx.compact(event)),
            kind: vocab::KIND_AFTER_EVENT.into(),
            start: None,
        },
        Timing::BeforeEvent(event) => ManifestTiming {
            end: None,
            event: Some(ctx.compact(event)),
            kind: vocab::KIND_BEFORE_EVENT.into(),
            start: None,
        },
        Timing::During { start, end } => ManifestTiming {
            end: Some(ctx.compact(end)),
            event: None,
            kind: vocab::KIND_DURING.into(),
            start: Some(ctx.compact(start)),
        },
    }
}

fn object_config(graph: &Graph, element: &Iri) -> ElementConfig {
    let half = [
        number_object(graph, element, &vocab::half_extent_x()),
        number_object(graph, element, &vocab::half_extent_y()),
        number_object(graph, element, &vocab::half_extent_z()),
    ];
    let range = [
        number_object(graph, element, &vocab::pos_min_x()),
        number_object(graph, element, &vocab::pos_min_y()),
        number_object(graph, element, &vocab::pos_max_x()),
        number_object(graph, element, &vocab::pos_max_y()),
    ];
    ElementConfig {
        half_extents_m: match half {
            [Some(x), Some(y), Some(z)] => Some([x, y, z]),
            _ => None,
        },
        kind: "object".into(),
        mass_kg: number_object(graph, element, &vocab::mass_kg()),
        position_range_m: match range {
            [Some(x0), Some(y0), Some(x1), Some(y1)] => Some([[x0, y0], [x1, y1]]),
            _ => None,
        },
        ..Default::default()
    }
}

fn workspace_config(graph: &Graph, element: &Iri) -> ElementConfig {
    let aabb = [
        number_object(graph, element, &vocab::aabb_min_x()),
        number_object(graph, element, &vocab::aabb_min_y()),
        number_object(graph, element, &vocab::aabb_min_z()),
        number_object(graph, element, &vocab::aabb_max_x()),
        number_object(graph, element, &vocab::aabb_max_y()),
        number_object(graph, element, &vocab::aabb_max_z()),
    ];
    ElementConfig {
        aabb_m: match aabb {
            [Some(a), Some(b), Some(c), Some(d), Some(e), Some(f)] => Some([a, b, c, d, e, f]),
            _ => None,
        },
        bin_base_height_m: number_object(graph, element, &vocab::bin_base_height_m()),
        kind: "workspace".into(),
        workspace_kind: text_object(graph, element, &vocab::workspace_kind()),
        ..Default::default()
    }
}
