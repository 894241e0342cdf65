//! Experiment harness behind the `ttnc` binary: compilation, fidelity and
//! depth benchmarks, and verifier demonstrations, all emitting CSV.

pub mod bench;
pub mod compile;
pub mod config;
pub mod csv;
pub mod error;
pub mod verify;

pub use config::BenchConfig;
pub use error::{CliError, CliResult};
