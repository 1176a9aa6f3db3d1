//! Layered models of distributed systems and requirements-coverage test
//! template generation.
//!
//! A system is described by fact files ([`factlang`]) and built into a
//! four-layer [`model::SystemModel`]. [`validate`] checks its structure,
//! [`generate`] derives test templates layer by layer, and [`bounds`]
//! computes the analytic upper bounds on template counts.

pub mod bounds;
pub mod factlang;
pub mod generate;
pub mod model;
pub mod par;
pub mod validate;

pub use factlang::{parse_facts, render_facts, ComponentPattern, FactError, FactSet};
pub use generate::{run_strategy, Mode, PathLimits, StrategyConfig, StrategyReport};
pub use model::{ComponentRef, LayerId, SystemModel};
pub use par::Execution;
pub use validate::{Code, Diagnostic, Severity};
