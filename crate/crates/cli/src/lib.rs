//! Configuration-driven front end for the `fraclap` solvers.
//!
//! A run is described by a TOML file (see [`config::RunConfig`]) and
//! writes `report.csv`, `solution.json` and optional extra tables into an
//! output directory.

pub mod config;
pub mod expr;
pub mod run;

pub use config::RunConfig;
pub use run::{execute, Outcome};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Solver(#[from] fraclap::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Solver(_) => "solver",
        }
    }

    /// Machine-readable form printed on failure.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind(), "message": self.to_string() } }).to_string()
    }
}
