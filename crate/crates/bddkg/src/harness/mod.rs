//! Execution harness: a deterministic, seeded pick-and-place world driven
//! by the coordination manifest, with fluent-clause evaluation and suite
//! statistics.

mod config;
mod eval;
mod rng;
mod sim;
mod suite;
mod world;

pub use config::{
    Aabb, AgentConfig, ObjectConfig, RunConfig, SweepCombination, SweepConfig, WorkspaceConfig,
    WorkspaceKind, WorldConfig,
};
pub use eval::{
    eval_clause, evaluate_instance, outcome_of, ClauseVerdict, PredicateKind, ResolvedClause,
    ResolvedTiming, VerdictStatus,
};
pub use rng::{fnv1a64, SimRng};
pub use sim::{simulate_pick_place, EventTrace, PickPlaceJob, StateLog, StepState, WorkspaceSnapshot};
pub use suite::{
    derive_seed, execute_once, resolve_instance, run_suite, summarize_speeds, CombinationReport,
    ExecutionRecord, ResolvedInstance, RunReport, SpeedSummary, SuiteResult,
};
pub use world::{sample_world, WorkspaceState, WorldState};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// A clause's timing references an event the trace never emitted; a
    /// coordination bug, not a test failure.
    #[error("missing event {event} in the execution trace")]
    MissingEvent { event: String },
    #[error("unresolved binding: {0}")]
    UnresolvedBinding(String),
    #[error("invalid behaviour: {0}")]
    InvalidBehaviour(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot evaluate clause: {0}")]
    Evaluation(String),
    #[error("malformed manifest: {0}")]
    Manifest(String),
    #[error("empty sample")]
    EmptySample,
}
