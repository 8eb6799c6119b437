//! Fluent-clause evaluation against an event trace and state log.
//!
//! Timing resolution: `after-event e` evaluates at the first timestep
//! strictly after the event, `before-event e` at the last timestep strictly
//! before it, and `during a..b` requires the predicate to hold at every
//! timestep of the closed interval `[a, b]`.

use std::collections::BTreeMap;
use std::fmt;

use super::config::WorldConfig;
use super::sim::{EventTrace, StateLog};
use super::HarnessError;
use crate::codegen::Section;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateKind {
    IsLocatedAt,
    IsHeldBy,
    DoesNotCollide,
}

impl PredicateKind {
    pub fn parse(name: &str) -> Result<Self, HarnessError> {
        match name {
            "IsLocatedAt" => Ok(PredicateKind::IsLocatedAt),
            "IsHeldBy" => Ok(PredicateKind::IsHeldBy),
            "DoesNotCollide" => Ok(PredicateKind::DoesNotCollide),
            other => Err(HarnessError::Manifest(format!("unknown predicate {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PredicateKind::IsLocatedAt => "IsLocatedAt",
            PredicateKind::IsHeldBy => "IsHeldBy",
            PredicateKind::DoesNotCollide => "DoesNotCollide",
        }
    }
}

impl fmt::Display for PredicateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResolvedTiming {
    After(String),
    Before(String),
    During(String, String),
}

/// A manifest clause with every CURIE expanded to a full IRI.
#[derive(Debug, Clone)]
pub struct ResolvedClause {
    pub section: Section,
    pub predicate: PredicateKind,
    /// Role name to element IRI.
    pub roles: BTreeMap<String, String>,
    pub timing: ResolvedTiming,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    Pass,
    Fail,
    /// Not evaluated on its own: an earlier grasp check it depends on
    /// already failed.
    Skipped,
}

#[derive(Debug, Clone)]
pub struct ClauseVerdict {
    pub clause_index: usize,
    pub section: Section,
    pub predicate: PredicateKind,
    pub status: VerdictStatus,
    /// Closed evaluation interval; a point evaluation has start == end.
    pub eval_start: usize,
    pub eval_end: usize,
    /// Worst measured value over the interval (distance, displacement, or
    /// containment exceedance, in m).
    pub measured: f64,
    pub detail: String,
}

/// Evaluates a single clause.
pub fn eval_clause(
    clause: &ResolvedClause,
    clause_index: usize,
    trace: &EventTrace,
    log: &StateLog,
    cfg: &WorldConfig,
) -> Result<ClauseVerdict, HarnessError> {
    let (start, end) = eval_interval(&clause.timing, trace, log)?;

    let role_index = |role: &str, lookup: &dyn Fn(&str) -> Option<usize>| -> Result<usize, HarnessError> {
        let iri = clause.roles.get(role).ok_or_else(|| {
            HarnessError::UnresolvedBinding(format!("{} clause has no {role} role", clause.predicate))
        })?;
        lookup(iri).ok_or_else(|| {
            HarnessError::UnresolvedBinding(format!("{iri} is not part of the world config"))
        })
    };

    let (pass, measured, detail) = match clause.predicate {
        PredicateKind::IsLocatedAt => {
            let obj = role_index("object", &|iri| cfg.object_index(iri))?;
            let ws = role_index("workspace", &|iri| cfg.workspace_index(iri))?;
            let mut worst = 0.0_f64;
            for step in &log.steps[start..=end] {
                let exceed = containment_exceedance(step.objects[obj], &step.workspaces[ws].aabb);
                worst = worst.max(exceed);
            }
            (
                worst == 0.0,
                worst,
                format!("max containment exceedance {worst:.4} m over steps {start}..={end}"),
            )
        }
        PredicateKind::IsHeldBy => {
            let obj = role_index("object", &|iri| cfg.object_index(iri))?;
            let half = cfg.objects[obj].half_extents;
            let mut worst = 0.0_f64;
            for step in &log.steps[start..=end] {
                let d = point_box_distance(step.ee, step.objects[obj], half);
                worst = worst.max(d);
            }
            (
                worst <= cfg.grasp_distance_threshold,
                worst,
                format!(
                    "max EE-object distance {worst:.4} m over steps {start}..={end} (threshold {})",
                    cfg.grasp_distance_threshold
                ),
            )
        }
        PredicateKind::DoesNotCollide => {
            let ws = role_index("workspace", &|iri| cfg.workspace_index(iri))?;
            let mut worst = 0.0_f64;
            for step in &log.steps[start..=end] {
                worst = worst.max(step.workspaces[ws].displacement);
            }
            (
                worst <= cfg.collision_displacement_threshold,
                worst,
                format!(
                    "max accumulated displacement {worst:.4} m over steps {start}..={end} (threshold {})",
                    cfg.collision_displacement_threshold
                ),
            )
        }
    };

    Ok(ClauseVerdict {
        clause_index,
        section: clause.section,
        predicate: clause.predicate,
        status: if pass { VerdictStatus::Pass } else { VerdictStatus::Fail },
        eval_start: start,
        eval_end: end,
        measured,
        detail,
    })
}

/// Evaluates all clauses of an instance in order, then applies dependency
/// gating: once a Then-section grasp check (`IsHeldBy`) has failed, every
/// placement check (`IsLocatedAt`) evaluating at or after it is marked
/// skipped, so a record never reports a successful placement after a failed
/// grasp.
pub fn evaluate_instance(
    clauses: &[ResolvedClause],
    trace: &EventTrace,
    log: &StateLog,
    cfg: &WorldConfig,
) -> Result<Vec<ClauseVerdict>, HarnessError> {
    let mut verdicts = Vec::with_capacity(clauses.len());
    for (index, clause) in clauses.iter().enumerate() {
        verdicts.push(eval_clause(clause, index, trace, log, cfg)?);
    }

    let failed_grasp_step = verdicts
        .iter()
        .filter(|v| {
            v.section == Section::Then
                && v.predicate == PredicateKind::IsHeldBy
                && v.status == VerdictStatus::Fail
        })
        .map(|v| v.eval_start)
        .min();
    if let Some(grasp_step) = failed_grasp_step {
        for v in &mut verdicts {
            if v.section == Section::Then
                && v.predicate == PredicateKind::IsLocatedAt
                && v.eval_start >= grasp_step
            {
                v.status = VerdictStatus::Skipped;
                v.detail = "skipped: depends on a failed grasp".into();
            }
        }
    }
    Ok(verdicts)
}

/// Scenario outcome: the first failing clause, or `passed`.
pub fn outcome_of(verdicts: &[ClauseVerdict]) -> (String, String) {
    for v in verdicts {
        if v.status == VerdictStatus::Fail {
            return (format!("failed:{}", v.predicate), v.predicate.name().to_string());
        }
    }
    ("passed".to_string(), String::new())
}

fn eval_interval(
    timing: &ResolvedTiming,
    trace: &EventTrace,
    log: &StateLog,
) -> Result<(usize, usize), HarnessError> {
    let step_of = |event: &str| -> Result<usize, HarnessError> {
        trace
            .step_of(event)
            .ok_or_else(|| HarnessError::MissingEvent { event: event.to_string() })
    };
    match timing {
        ResolvedTiming::After(event) => {
            let t = step_of(event)?;
            let s = t + 1;
            if s >= log.len() {
                return Err(HarnessError::Evaluation(format!(
                    "no timestep after event {event} (fired at the final step {t})"
                )));
            }
            Ok((s, s))
        }
        ResolvedTiming::Before(event) => {
            let t = step_of(event)?;
            if t == 0 {
                return Err(HarnessError::Evaluation(format!(
                    "no timestep before event {event} (fired at step 0)"
                )));
            }
            Ok((t - 1, t - 1))
        }
        ResolvedTiming::During(a, b) => {
            let ta = step_of(a)?;
            let tb = step_of(b)?;
            if ta > tb {
                return Err(HarnessError::Evaluation(format!(
                    "during interval is reversed: {a} at {ta}, {b} at {tb}"
                )));
            }
            Ok((ta, tb))
        }
    }
}

/// How far `p` pokes out of `aabb`; 0 when contained.
fn containment_exceedance(p: [f64; 3], aabb: &super::config::Aabb) -> f64 {
    let mut worst = 0.0_f64;
    for ((v, lo), hi) in p.iter().zip(&aabb.min).zip(&aabb.max) {
        if v < lo {
            worst = worst.max(lo - v);
        } else if v > hi {
            worst = worst.max(v - hi);
        }
    }
    worst
}

/// Distance from a point to an axis-aligned box given by center and half
/// extents; 0 when the point is inside or on the surface.
fn point_box_distance(p: [f64; 3], center: [f64; 3], half: [f64; 3]) -> f64 {
    let mut sq = 0.0;
    for ((pi, ci), hi) in p.iter().zip(&center).zip(&half) {
        let d = (pi - ci).abs() - hi;
        if d > 0.0 {
            sq += d * d;
        }
    }
    sq.sqrt()
}
