//! Benchmark registry, run configuration and convergence-study runner
//! behind the `polyvem` command.

pub mod cases;
pub mod config;
pub mod error;
pub mod families;
pub mod runner;

pub use cases::{find_case, registry, verify_case, BenchmarkCase, CaseDomain, Verification};
pub use config::RunConfig;
pub use error::CliError;
pub use families::{build_mesh, level_seed, MeshFamily};
pub use runner::{run_case, run_level, LevelResult, RunOutcome, RESULTS_HEADER};
