//! Benchmark harness and command-line front end for `cascade-kde`.

pub mod cli;
pub mod config;
pub mod error;
pub mod plan;
pub mod report;
pub mod run;

pub use error::{BenchError, BenchResult};
pub use plan::{BenchmarkPlan, Method, MethodSpec};
pub use run::{run_plan, runtime_sweep, PlanOutcome, ResultRow};
