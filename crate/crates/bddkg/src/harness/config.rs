//! Run configuration (`run.json`) and the per-execution world config built
//! from it plus the manifest's element data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::codegen::CoordinationManifest;
use crate::dsl::EeKind;

fn default_dt() -> f64 {
    0.01
}

fn default_transport_height() -> f64 {
    0.3
}

fn default_threshold() -> f64 {
    0.05
}

/// Parsed `run.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub sweep: SweepConfig,
    pub repetitions: u32,
    pub master_seed: u64,
    #[serde(default = "default_dt")]
    pub dt_s: f64,
    #[serde(default = "default_transport_height")]
    pub transport_height_m: f64,
    #[serde(default)]
    pub slip_probability: f64,
    #[serde(default = "default_threshold")]
    pub grasp_distance_threshold_m: f64,
    #[serde(default = "default_threshold")]
    pub collision_displacement_threshold_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Agent IRIs or CURIEs resolvable in the manifest context.
    pub agents: Vec<String>,
    /// Named position ranges `[[x_min, y_min], [x_max, y_max]]` applied to
    /// every object of the combination.
    pub ranges: BTreeMap<String, [[f64; 2]; 2]>,
    pub bin_height_scales: Vec<f64>,
}

/// Finite and strictly positive.
fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| HarnessError::InvalidConfig(format!("run config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| Err(HarnessError::InvalidConfig(msg.to_string()));
        if self.repetitions < 1 {
            return bad("repetitions must be at least 1");
        }
        if !positive(self.dt_s) {
            return bad("dt_s must be positive");
        }
        if !positive(self.grasp_distance_threshold_m) || !positive(self.collision_displacement_threshold_m) {
            return bad("thresholds must be positive");
        }
        if !(0.0..=1.0).contains(&self.slip_probability) {
            return bad("slip_probability must be within [0, 1]");
        }
        if self.sweep.agents.is_empty() || self.sweep.ranges.is_empty() || self.sweep.bin_height_scales.is_empty() {
            return bad("sweep must list agents, ranges, and bin_height_scales");
        }
        for (name, [[x0, y0], [x1, y1]]) in &self.sweep.ranges {
            if !(x0 < x1 && y0 < y1) {
                return Err(HarnessError::InvalidConfig(format!(
                    "range {name:?} must satisfy min < max per axis"
                )));
            }
        }
        for scale in &self.sweep.bin_height_scales {
            if !positive(*scale) {
                return bad("bin_height_scales must be positive");
            }
        }
        Ok(())
    }

    /// The cartesian sweep, normalized: sorted by agent IRI, range name,
    /// then scale, independent of the order in the file.
    pub fn combinations(&self, manifest: &CoordinationManifest) -> Vec<SweepCombination> {
        let mut agents: Vec<String> = self
            .sweep
            .agents
            .iter()
            .map(|a| manifest.expand(a).unwrap_or_else(|| a.clone()))
            .collect();
        agents.sort();
        agents.dedup();
        let mut scales = self.sweep.bin_height_scales.clone();
        scales.sort_by(f64::total_cmp);
        scales.dedup();

        let mut out = Vec::new();
        for agent in &agents {
            for (range_name, bounds) in &self.sweep.ranges {
                for &scale in &scales {
                    out.push(SweepCombination {
                        agent: agent.clone(),
                        range_name: range_name.clone(),
                        range: *bounds,
                        bin_height_scale: scale,
                    });
                }
            }
        }
        out
    }
}

/// One (agent, position range, bin height scale) sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCombination {
    /// Expanded agent IRI.
    pub agent: String,
    pub range_name: String,
    pub range: [[f64; 2]; 2],
    pub bin_height_scale: f64,
}

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|i| self.min[i] <= p[i] && p[i] <= self.max[i])
    }

    pub fn contains_xy(&self, p: [f64; 3]) -> bool {
        (0..2).all(|i| self.min[i] <= p[i] && p[i] <= self.max[i])
    }

    pub fn center_xy(&self) -> [f64; 2] {
        [(self.min[0] + self.max[0]) / 2.0, (self.min[1] + self.max[1]) / 2.0]
    }

    pub fn translate_xy(&mut self, d: [f64; 2]) {
        self.min[0] += d[0];
        self.max[0] += d[0];
        self.min[1] += d[1];
        self.max[1] += d[1];
    }
}

#[derive(Debug, Clone)]
pub struct ObjectConfig {
    pub iri: String,
    pub mass_kg: f64,
    pub half_extents: [f64; 3],
    /// `[[x_min, y_min], [x_max, y_max]]` initial-position bounds.
    pub range: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkspaceKind {
    Table,
    Bin,
}

#[derive(Debug, Clone)]
pub struct WorkspaceConfig {
    pub iri: String,
    pub aabb: Aabb,
    pub kind: WorkspaceKind,
    /// Wall-top height of a bin before scaling; 0 for tables.
    pub bin_base_height_m: f64,
}

#[derive(Debug, Clone)]
pub struct AgentConfig {
    pub iri: String,
    pub ee: EeKind,
}

impl AgentConfig {
    /// EE nominal speed: 0.5 m/s for grippers, 1.0 m/s for suction cups.
    pub fn nominal_speed(&self) -> f64 {
        match self.ee {
            EeKind::Gripper => 0.5,
            EeKind::Suction => 1.0,
        }
    }

    /// Vertical offset between EE and held-object center: a suction cup
    /// holds the object by its top face, a gripper encloses its center.
    pub fn attach_offset_z(&self, half_extent_z: f64) -> f64 {
        match self.ee {
            EeKind::Gripper => 0.0,
            EeKind::Suction => half_extent_z,
        }
    }
}

/// Everything one execution needs to run.
#[derive(Debug, Clone)]
pub struct WorldConfig {
    /// Objects sorted by IRI.
    pub objects: Vec<ObjectConfig>,
    /// Workspaces sorted by IRI.
    pub workspaces: Vec<WorkspaceConfig>,
    pub agent: AgentConfig,
    pub bin_height_scale: f64,
    pub transport_height: f64,
    pub dt: f64,
    pub slip_probability: f64,
    pub grasp_distance_threshold: f64,
    pub collision_displacement_threshold: f64,
}

impl WorldConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.objects.is_empty() {
            return Err(HarnessError::InvalidConfig("world has no objects".into()));
        }
        for o in &self.objects {
            let [[x0, y0], [x1, y1]] = o.range;
            if !(x0 < x1 && y0 < y1) {
                return Err(HarnessError::InvalidConfig(format!(
                    "object {} range must satisfy min < max per axis",
                    o.iri
                )));
            }
            if o.half_extents.iter().any(|h| !positive(*h)) {
                return Err(HarnessError::InvalidConfig(format!(
                    "object {} half extents must be positive",
                    o.iri
                )));
            }
        }
        if !positive(self.dt)
            || !positive(self.grasp_distance_threshold)
            || !positive(self.collision_displacement_threshold)
        {
            return Err(HarnessError::InvalidConfig("dt and thresholds must be positive".into()));
        }
        Ok(())
    }

    pub fn object_index(&self, iri: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.iri == iri)
    }

    pub fn workspace_index(&self, iri: &str) -> Option<usize> {
        self.workspaces.iter().position(|w| w.iri == iri)
    }

    /// Scaled wall-top height of a bin workspace.
    pub fn bin_top(&self, ws: &WorkspaceConfig) -> f64 {
        ws.bin_base_height_m * self.bin_height_scale
    }
}
