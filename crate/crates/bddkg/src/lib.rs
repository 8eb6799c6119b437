//! Toolchain for specifying and executing robotic acceptance criteria.
//!
//! Acceptance criteria are written in a small Given/When/Then DSL, lowered
//! into a knowledge graph (a JSON-LD subset), validated against structural
//! shapes, expanded into concrete scenario variations, emitted as Gherkin
//! feature files plus a coordination manifest, and finally executed against
//! a deterministic pick-and-place micro-simulator that checks each fluent
//! clause at its declared time constraint.
//!
//! Modules follow the pipeline order:
//! - [`kg`]: IRIs, triples, graphs, JSON-LD subset I/O.
//! - [`shapes`]: structural validation of BDD model graphs.
//! - [`query`]: basic graph pattern matching and CONSTRUCT.
//! - [`dsl`]: the `.bdd`/`.scene` languages and lowering to graphs.
//! - [`codegen`]: variation expansion, Gherkin and manifest emission.
//! - [`harness`]: seeded simulation, clause evaluation, suite reports.

pub mod codegen;
pub mod dsl;
pub mod harness;
pub mod kg;
pub mod query;
pub mod shapes;
pub mod vocab;
