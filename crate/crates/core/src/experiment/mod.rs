//! Batch front end: configurations, runs, schema descriptions and the
//! oracle suite.

pub mod config;
pub mod describe;
pub mod run;
pub mod verify;

pub use config::{ExperimentConfig, Kind};
pub use describe::describe;
pub use run::{execute, run_file, run_into, Artifact, RunOutcome};
pub use verify::{verify, VerifyReport};
