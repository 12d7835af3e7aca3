//! Bat Algorithm (BA) and Modified Bat Algorithm (MBA) swarm optimizers.
//!
//! - [`swarm`]: bounds, parameters, bat and incumbent state, initialization
//! - [`optimizers`]: candidate moves, acceptance and the run loop
//! - [`benchmarks`]: the classical F1–F23 objective registry
//! - [`analysis`]: run statistics, Wilcoxon rank-sum, diversity
//! - [`assignment`]: random-key assignment solver and brute-force oracle
//! - [`cli`]: the `batopt` experiment harness

pub mod analysis;
pub mod assignment;
pub mod benchmarks;
pub mod cli;
pub mod error;
pub mod optimizers;
pub mod rng;
pub mod swarm;

pub use error::{Error, Result};
pub use optimizers::{run, run_objective, Algorithm, RunConfig, RunResult};
pub use rng::RngStream;
