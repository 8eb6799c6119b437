//! Suite execution: run every manifest instance across the sweep, with a
//! per-execution seed derived from the master seed, and aggregate outcome
//! statistics. Executions are independent and run in parallel; records are
//! merged in normalized order, so the report is identical for any thread
//! count or schedule.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{
    AgentConfig, ObjectConfig, RunConfig, SweepCombination, WorkspaceConfig, WorkspaceKind,
    WorldConfig,
};
use super::eval::{
    evaluate_instance, outcome_of, ClauseVerdict, PredicateKind, ResolvedClause, ResolvedTiming,
};
use super::rng::fnv1a64;
use super::sim::{simulate_pick_place, PickPlaceJob};
use super::world::sample_world;
use super::HarnessError;
use crate::codegen::{CoordinationManifest, ManifestInstance, Section};
use crate::dsl::EeKind;
use crate::kg::fmt_number;

/// One scenario execution with its per-clause verdicts.
#[derive(Debug, Clone)]
pub struct ExecutionRecord {
    pub agent: String,
    pub range: String,
    pub bin_height_scale: f64,
    pub instance: String,
    pub repetition: u32,
    pub verdicts: Vec<ClauseVerdict>,
    /// `passed` or `failed:<predicate>` of the first failing clause.
    pub outcome: String,
    pub failing_clause: String,
    pub max_ee_speed: f64,
}

/// Five-number summary of per-execution max EE speeds.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SpeedSummary {
    pub max: f64,
    pub median: f64,
    pub min: f64,
    pub q1: f64,
    pub q3: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CombinationReport {
    pub agent: String,
    pub bin_height_scale: f64,
    pub executions: usize,
    /// Summary over passing executions; absent when none passed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_ee_speed_passing: Option<SpeedSummary>,
    pub outcomes: BTreeMap<String, usize>,
    pub percentages: BTreeMap<String, f64>,
    pub range: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunReport {
    pub combinations: Vec<CombinationReport>,
    pub per_agent_max_ee_speed: BTreeMap<String, SpeedSummary>,
    pub total_executions: usize,
}

impl RunReport {
    pub fn to_json_string(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub report: RunReport,
    /// All records in normalized (combination, instance, repetition) order.
    pub records: Vec<ExecutionRecord>,
}

impl SuiteResult {
    /// One CSV row per execution.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(
            "agent,range,bin_height_scale,instance,repetition,outcome,failing_clause,max_ee_speed_m_s\n",
        );
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.agent,
                r.range,
                fmt_number(r.bin_height_scale),
                r.instance,
                r.repetition,
                r.outcome,
                r.failing_clause,
                fmt_number(r.max_ee_speed),
            ));
        }
        out
    }
}

/// A manifest instance with every CURIE expanded and the pick-place
/// targets selected.
#[derive(Debug, Clone)]
pub struct ResolvedInstance {
    pub id: String,
    pub clauses: Vec<ResolvedClause>,
    pub events: Vec<String>,
    pub target_object: String,
    pub target_workspace: String,
    pub objects: Vec<ObjectConfig>,
    pub workspaces: Vec<WorkspaceConfig>,
    /// Agent IRI to end effector, for the sweep to choose from.
    pub agents: BTreeMap<String, EeKind>,
}

/// Expands one manifest instance. The pick-place target object and
/// destination workspace come from the last Then-section `IsLocatedAt`
/// clause; without one, the first object role and the first bin workspace
/// are used.
pub fn resolve_instance(
    manifest: &CoordinationManifest,
    instance: &ManifestInstance,
) -> Result<ResolvedInstance, HarnessError> {
    let expand = |token: &str| -> String {
        manifest.expand(token).unwrap_or_else(|| token.to_string())
    };

    let mut clauses = Vec::new();
    for clause in &instance.clauses {
        let section = match clause.section.as_str() {
            "given" => Section::Given,
            "then" => Section::Then,
            other => {
                return Err(HarnessError::Manifest(format!("unknown clause section {other:?}")))
            }
        };
        let predicate = PredicateKind::parse(&clause.predicate)?;
        let roles: BTreeMap<String, String> = clause
            .roles
            .iter()
            .map(|(role, element)| (role.clone(), expand(element)))
            .collect();
        let timing = match clause.timing.kind.as_str() {
            "after-event" => ResolvedTiming::After(expand(
                clause.timing.event.as_deref().ok_or_else(|| {
                    HarnessError::Manifest("after-event timing without event".into())
                })?,
            )),
            "before-event" => ResolvedTiming::Before(expand(
                clause.timing.event.as_deref().ok_or_else(|| {
                    HarnessError::Manifest("before-event timing without event".into())
                })?,
            )),
            "during" => {
                let start = clause.timing.start.as_deref().ok_or_else(|| {
                    HarnessError::Manifest("during timing without start event".into())
                })?;
                let end = clause.timing.end.as_deref().ok_or_else(|| {
                    HarnessError::Manifest("during timing without end event".into())
                })?;
                ResolvedTiming::During(expand(start), expand(end))
            }
            other => {
                return Err(HarnessError::Manifest(format!("unknown timing kind {other:?}")))
            }
        };
        clauses.push(ResolvedClause { section, predicate, roles, timing });
    }

    let mut objects = Vec::new();
    let mut workspaces = Vec::new();
    let mut agents = BTreeMap::new();
    for (curie, config) in &instance.elements {
        let iri = expand(curie);
        match config.kind.as_str() {
            "object" => {
                let half = config.half_extents_m.ok_or_else(|| {
                    HarnessError::Manifest(format!("object {iri} has no half extents"))
                })?;
                objects.push(ObjectConfig {
                    iri,
                    mass_kg: config.mass_kg.unwrap_or(0.0),
                    half_extents: half,
                    // Placeholder; the sweep range overrides it per run.
                    range: config.position_range_m.unwrap_or([[0.0, 0.0], [1.0, 1.0]]),
                });
            }
            "workspace" => {
                let aabb = config.aabb_m.ok_or_else(|| {
                    HarnessError::Manifest(format!("workspace {iri} has no AABB"))
                })?;
                let kind = match config.workspace_kind.as_deref() {
                    Some("bin") => WorkspaceKind::Bin,
                    _ => WorkspaceKind::Table,
                };
                workspaces.push(WorkspaceConfig {
                    iri,
                    aabb: super::config::Aabb {
                        min: [aabb[0], aabb[1], aabb[2]],
                        max: [aabb[3], aabb[4], aabb[5]],
                    },
                    kind,
                    bin_base_height_m: config.bin_base_height_m.unwrap_or(0.0),
                });
            }
            "agent" => {
                let ee = match config.ee.as_deref() {
                    Some("gripper") => EeKind::Gripper,
                    Some("suction") => EeKind::Suction,
                    other => {
                        return Err(HarnessError::Manifest(format!(
                            "agent {iri} has unknown end effector {other:?}"
                        )))
                    }
                };
                agents.insert(iri, ee);
            }
            other => {
                return Err(HarnessError::Manifest(format!("unknown element kind {other:?}")))
            }
        }
    }
    objects.sort_by(|a, b| a.iri.cmp(&b.iri));
    workspaces.sort_by(|a, b| a.iri.cmp(&b.iri));

    let place_clause = clauses
        .iter()
        .rev()
        .find(|c| c.section == Section::Then && c.predicate == PredicateKind::IsLocatedAt);
    let (target_object, target_workspace) = match place_clause {
        Some(clause) => (
            clause.roles.get("object").cloned(),
            clause.roles.get("workspace").cloned(),
        ),
        None => (
            clauses.iter().find_map(|c| c.roles.get("object").cloned()),
            workspaces
                .iter()
                .find(|w| w.kind == WorkspaceKind::Bin)
                .map(|w| w.iri.clone()),
        ),
    };
    let target_object = target_object.ok_or_else(|| {
        HarnessError::UnresolvedBinding(format!("instance {} has no target object", instance.id))
    })?;
    let target_workspace = target_workspace.ok_or_else(|| {
        HarnessError::UnresolvedBinding(format!("instance {} has no target workspace", instance.id))
    })?;

    Ok(ResolvedInstance {
        id: instance.id.clone(),
        clauses,
        events: instance.events.iter().map(|e| expand(e)).collect(),
        target_object,
        target_workspace,
        objects,
        workspaces,
        agents,
    })
}

/// Per-execution seed: a stable hash of the master seed, the sweep
/// combination, the instance id, and the repetition index.
pub fn derive_seed(
    master_seed: u64,
    combo: &SweepCombination,
    instance_id: &str,
    repetition: u32,
) -> u64 {
    let mut bytes = Vec::with_capacity(64);
    bytes.extend_from_slice(&master_seed.to_le_bytes());
    bytes.push(0xFF);
    bytes.extend_from_slice(combo.agent.as_bytes());
    bytes.push(0xFF);
    bytes.extend_from_slice(combo.range_name.as_bytes());
    bytes.push(0xFF);
    bytes.extend_from_slice(&combo.bin_height_scale.to_bits().to_le_bytes());
    bytes.push(0xFF);
    bytes.extend_from_slice(instance_id.as_bytes());
    bytes.push(0xFF);
    bytes.extend_from_slice(&repetition.to_le_bytes());
    fnv1a64(&bytes)
}

fn world_config_for(
    instance: &ResolvedInstance,
    combo: &SweepCombination,
    config: &RunConfig,
) -> Result<WorldConfig, HarnessError> {
    let ee = instance.agents.get(&combo.agent).copied().ok_or_else(|| {
        HarnessError::UnresolvedBinding(format!(
            "sweep agent {} is not an agent of the scene",
            combo.agent
        ))
    })?;
    let objects = instance
        .objects
        .iter()
        .map(|o| ObjectConfig { range: combo.range, ..o.clone() })
        .collect();
    let world = WorldConfig {
        objects,
        workspaces: instance.workspaces.clone(),
        agent: AgentConfig { iri: combo.agent.clone(), ee },
        bin_height_scale: combo.bin_height_scale,
        transport_height: config.transport_height_m,
        dt: config.dt_s,
        slip_probability: config.slip_probability,
        grasp_distance_threshold: config.grasp_distance_threshold_m,
        collision_displacement_threshold: config.collision_displacement_threshold_m,
    };
    world.validate()?;
    Ok(world)
}

/// Runs one instance once and evaluates its clauses.
pub fn execute_once(
    instance: &ResolvedInstance,
    combo: &SweepCombination,
    config: &RunConfig,
    repetition: u32,
) -> Result<ExecutionRecord, HarnessError> {
    let world_cfg = world_config_for(instance, combo, config)?;
    let seed = derive_seed(config.master_seed, combo, &instance.id, repetition);
    let state = sample_world(&world_cfg, seed);
    let target_object = world_cfg.object_index(&instance.target_object).ok_or_else(|| {
        HarnessError::UnresolvedBinding(format!("{} is not a scene object", instance.target_object))
    })?;
    let target_workspace = world_cfg.workspace_index(&instance.target_workspace).ok_or_else(|| {
        HarnessError::UnresolvedBinding(format!(
            "{} is not a scene workspace",
            instance.target_workspace
        ))
    })?;
    let job = PickPlaceJob { target_object, target_workspace, events: &instance.events };
    let (trace, log) = simulate_pick_place(state, &job, &world_cfg, seed)?;
    let verdicts = evaluate_instance(&instance.clauses, &trace, &log, &world_cfg)?;
    let (outcome, failing_clause) = outcome_of(&verdicts);
    Ok(ExecutionRecord {
        agent: combo.agent.clone(),
        range: combo.range_name.clone(),
        bin_height_scale: combo.bin_height_scale,
        instance: instance.id.clone(),
        repetition,
        verdicts,
        outcome,
        failing_clause,
        max_ee_speed: log.max_ee_speed(),
    })
}

/// Executes the full sweep and aggregates the report.
pub fn run_suite(
    manifest: &CoordinationManifest,
    config: &RunConfig,
) -> Result<SuiteResult, HarnessError> {
    config.validate()?;
    let combos = config.combinations(manifest);
    let instances = manifest
        .instances
        .iter()
        .map(|i| resolve_instance(manifest, i))
        .collect::<Result<Vec<_>, _>>()?;
    if instances.is_empty() {
        return Err(HarnessError::Manifest("manifest has no instances".into()));
    }

    let mut jobs = Vec::with_capacity(combos.len() * instances.len() * config.repetitions as usize);
    for combo in &combos {
        for instance in &instances {
            for repetition in 0..config.repetitions {
                jobs.push((combo, instance, repetition));
            }
        }
    }

    let mut records = jobs
        .par_iter()
        .map(|(combo, instance, repetition)| execute_once(instance, combo, config, *repetition))
        .collect::<Result<Vec<_>, _>>()?;
    records.sort_by(|a, b| {
        a.agent
            .cmp(&b.agent)
            .then_with(|| a.range.cmp(&b.range))
            .then_with(|| a.bin_height_scale.total_cmp(&b.bin_height_scale))
            .then_with(|| a.instance.cmp(&b.instance))
            .then_with(|| a.repetition.cmp(&b.repetition))
    });

    let report = build_report(&combos, &records)?;
    Ok(SuiteResult { report, records })
}

fn build_report(
    combos: &[SweepCombination],
    records: &[ExecutionRecord],
) -> Result<RunReport, HarnessError> {
    let mut combinations = Vec::with_capacity(combos.len());
    for combo in combos {
        let combo_records: Vec<&ExecutionRecord> = records
            .iter()
            .filter(|r| {
                r.agent == combo.agent
                    && r.range == combo.range_name
                    && r.bin_height_scale == combo.bin_height_scale
            })
            .collect();
        let mut outcomes: BTreeMap<String, usize> = BTreeMap::new();
        for r in &combo_records {
            *outcomes.entry(r.outcome.clone()).or_insert(0) += 1;
        }
        let total = combo_records.len();
        let percentages = outcomes
            .iter()
            .map(|(k, &n)| (k.clone(), n as f64 / total as f64 * 100.0))
            .collect();
        let passing: Vec<f64> = combo_records
            .iter()
            .filter(|r| r.outcome == "passed")
            .map(|r| r.max_ee_speed)
            .collect();
        combinations.push(CombinationReport {
            agent: combo.agent.clone(),
            bin_height_scale: combo.bin_height_scale,
            executions: total,
            max_ee_speed_passing: summarize_speeds(&passing).ok(),
            outcomes,
            percentages,
            range: combo.range_name.clone(),
        });
    }

    let mut per_agent: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.outcome == "passed") {
        per_agent.entry(r.agent.clone()).or_default().push(r.max_ee_speed);
    }
    let per_agent_max_ee_speed = per_agent
        .into_iter()
        .filter_map(|(agent, speeds)| summarize_speeds(&speeds).ok().map(|s| (agent, s)))
        .collect();

    Ok(RunReport { combinations, per_agent_max_ee_speed, total_executions: records.len() })
}

/// Five-number summary (min, quartiles, max) with linear interpolation
/// between order statistics.
pub fn summarize_speeds(speeds: &[f64]) -> Result<SpeedSummary, HarnessError> {
    if speeds.is_empty() {
        return Err(HarnessError::EmptySample);
    }
    let mut sorted = speeds.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| -> f64 {
        let h = (sorted.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    };
    Ok(SpeedSummary { max: sorted[sorted.len() - 1], median: q(0.5), min: sorted[0], q1: q(0.25), q3: q(0.75) })
}
