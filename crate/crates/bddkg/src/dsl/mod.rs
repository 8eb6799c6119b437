//! The acceptance-criteria DSL (`.bdd`) and scene DSL (`.scene`): parsing,
//! import resolution, and lowering into metamodel-conformant graphs.

mod lexer;
mod lower;
mod parser;
mod project;

pub use lower::{lower_to_graph, SourcePos};
pub use parser::{parse_bdd_dsl, parse_scene_dsl};
pub use project::{load_project, Project};

use std::fmt;

use thiserror::Error;

/// Line/column of a syntax node, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error)]
pub enum DslError {
    #[error("syntax error at {line}:{col}: expected {expected}, found {found}")]
    Syntax { line: usize, col: usize, expected: String, found: String },
    #[error("duplicate {kind} name {name:?} at {pos}")]
    DuplicateName { kind: &'static str, name: String, pos: Pos },
    #[error("unknown {kind} {name:?} at {pos}")]
    UnknownReference { kind: &'static str, name: String, pos: Pos },
    #[error("invalid clause at {pos}: {msg}")]
    InvalidClause { pos: Pos, msg: String },
    #[error("invalid scene attribute at {pos}: {msg}")]
    InvalidScene { pos: Pos, msg: String },
    #[error("cyclic import: {}", chain.join(" -> "))]
    CyclicImport { chain: Vec<String> },
    #[error("file not found: {path} (import chain: {})", chain.join(" -> "))]
    FileNotFound { path: String, chain: Vec<String> },
    #[error("cannot lower model: {0}")]
    Lowering(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Parsed `.bdd` file before lowering.
#[derive(Debug, Clone, Default)]
pub struct SourceModel {
    /// Display name of the source file, used in diagnostics.
    pub source: String,
    pub imports: Vec<(String, Pos)>,
    pub events: Vec<(String, Pos)>,
    pub templates: Vec<TemplateDecl>,
    pub stories: Vec<StoryDecl>,
}

#[derive(Debug, Clone)]
pub struct TemplateDecl {
    pub name: String,
    pub pos: Pos,
    pub variables: Vec<(String, Pos)>,
    pub given: Vec<ClauseDecl>,
    pub behaviour: String,
    pub behaviour_pos: Pos,
    pub emits: Vec<(String, Pos)>,
    pub then: Vec<ClauseDecl>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    IsLocatedAt,
    IsHeldBy,
    DoesNotCollide,
}

impl Predicate {
    pub fn name(&self) -> &'static str {
        match self {
            Predicate::IsLocatedAt => "IsLocatedAt",
            Predicate::IsHeldBy => "IsHeldBy",
            Predicate::DoesNotCollide => "DoesNotCollide",
        }
    }

    /// The exact role set each predicate takes.
    pub fn arity(&self) -> &'static [Role] {
        match self {
            Predicate::IsLocatedAt => &[Role::Object, Role::Workspace],
            Predicate::IsHeldBy => &[Role::Object, Role::Agent],
            Predicate::DoesNotCollide => &[Role::Agent, Role::Workspace],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    Object,
    Agent,
    Workspace,
}

impl Role {
    pub fn name(&self) -> &'static str {
        match self {
            Role::Object => "object",
            Role::Agent => "agent",
            Role::Workspace => "workspace",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClauseDecl {
    pub predicate: Predicate,
    pub pos: Pos,
    /// Role to variable name, in source order.
    pub roles: Vec<(Role, String, Pos)>,
    pub timing: TimingDecl,
}

#[derive(Debug, Clone)]
pub enum TimingDecl {
    After { event: String, pos: Pos },
    Before { event: String, pos: Pos },
    During { start: String, end: String, pos: Pos },
}

#[derive(Debug, Clone)]
pub struct StoryDecl {
    pub name: String,
    pub pos: Pos,
    pub variants: Vec<VariantDecl>,
}

#[derive(Debug, Clone)]
pub struct VariantDecl {
    pub name: String,
    pub pos: Pos,
    pub template: (String, Pos),
    pub scene: (String, Pos),
    /// `foreach <variable> in [element, …]`.
    pub variations: Vec<ForeachDecl>,
}

#[derive(Debug, Clone)]
pub struct ForeachDecl {
    pub variable: String,
    pub pos: Pos,
    pub values: Vec<(String, Pos)>,
}

/// Parsed `.scene` file.
#[derive(Debug, Clone, Default)]
pub struct SceneModel {
    /// Scene name; resolved from the file stem when loaded from disk.
    pub name: String,
    pub source: String,
    pub objects: Vec<ObjectDecl>,
    pub agents: Vec<AgentDecl>,
    pub workspaces: Vec<WorkspaceDecl>,
}

#[derive(Debug, Clone)]
pub struct ObjectDecl {
    pub name: String,
    pub pos: Pos,
    pub mass_kg: f64,
    pub half_extents_m: [f64; 3],
    /// `[x_min, y_min, x_max, y_max]` initial-position sampling bounds.
    pub position_range_m: Option<[f64; 4]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EeKind {
    Gripper,
    Suction,
}

impl EeKind {
    pub fn name(&self) -> &'static str {
        match self {
            EeKind::Gripper => "gripper",
            EeKind::Suction => "suction",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AgentDecl {
    pub name: String,
    pub pos: Pos,
    pub ee: EeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkspaceKind {
    Table,
    Bin,
}

impl WorkspaceKind {
    pub fn name(&self) -> &'static str {
        match self {
            WorkspaceKind::Table => "table",
            WorkspaceKind::Bin => "bin",
        }
    }
}

#[derive(Debug, Clone)]
pub struct WorkspaceDecl {
    pub name: String,
    pub pos: Pos,
    /// `[min_x, min_y, min_z, max_x, max_y, max_z]`.
    pub aabb_m: [f64; 6],
    pub kind: WorkspaceKind,
    pub bin_base_height_m: Option<f64>,
}
