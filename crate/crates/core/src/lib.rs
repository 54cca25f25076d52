//! A genetic-programming engine that synthesizes pure, strongly typed
//! functional programs from input/output examples.
//!
//! The pipeline: a problem fixes a [`grammar::TypeUniverse`]; the catalog is
//! monomorphized over it; [`tables`] precompute which types are producible at
//! which depth; [`generate`] builds random well-typed trees (including
//! higher-order functions with lambda arguments); [`evolve`] runs a
//! steady-state search against the problem's training cases; [`refine`]
//! shrinks the best tree by constant folding, law rewriting, and local
//! search; [`report`] orchestrates seeds x problems and renders results.

pub mod fitness;
pub mod generate;
pub mod grammar;
pub mod interp;
pub mod evolve;
pub mod problems;
pub mod refine;
pub mod render;
pub mod report;
pub mod sexpr;
pub mod tables;
pub mod tree;
pub mod types;
pub mod value;

pub use evolve::{EvolutionConfig, Individual, RunResult};
pub use fitness::Fitness;
pub use generate::{GenConfig, GenContext, GenError};
pub use grammar::{ConcreteSig, Func, GrammarInstance, TypeUniverse};
pub use problems::{BenchmarkSpec, Case, Dataset, Metric};
pub use interp::{ErrorKind, EvalBudget, RuntimeError};
pub use tables::{LambdaTables, Method, TypeTable};
pub use tree::{depth, node_count, program_depth, type_of, Tree, TypeError};
pub use types::Type;
pub use value::Value;
