//! Command-line front end for `flatcone`.
//!
//! Every subcommand reads one JSON problem file (see [`spec::ProblemSpec`]),
//! computes, and writes JSON, CSV or SVG. Floating output always carries 17
//! significant digits so that identical inputs give byte-identical files.

pub mod commands;
pub mod output;
pub mod spec;
pub mod svg;

use serde::Serialize;
use thiserror::Error;

pub use commands::{run, Command, Format};
pub use spec::ProblemSpec;
pub use svg::{emit_svg, SvgStyle};

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent input, or a failed Gauss-Bonnet check.
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Numeric(flatcone::Error),
    #[error("{0}")]
    Io(String),
}

impl From<flatcone::Error> for CliError {
    fn from(e: flatcone::Error) -> Self {
        if e.is_numerical() {
            CliError::Numeric(e)
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Numeric(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    /// One-line JSON for standard error.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            error: &'a str,
            message: String,
            exit_code: i32,
        }
        let report = Report { error: self.kind(), message: self.to_string(), exit_code: self.exit_code() };
        serde_json::to_string(&report).unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", self.kind()))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
