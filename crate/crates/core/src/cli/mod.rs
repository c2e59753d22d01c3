//! Command surface behind the `picklab` binary: input parsing, command
//! execution, the reproduction registry and JSON reports.

pub mod commands;
pub mod registry;
pub mod report;
pub mod schema;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::kernel::DEFAULT_TOL;
use crate::sampling::DEFAULT_SEED;

pub use report::{Provenance, Report};
pub use schema::InputDoc;

/// Environment variable consulted for the default tolerance.
pub const TOL_ENV: &str = "PICKLAB_TOL";

pub const DEFAULT_RESOLUTION: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Options {
    pub tol: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,
    pub exact: bool,
    pub resolution: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
            max_n: None,
            exact: false,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Gram,
    PickNorm,
    Distance,
    Curve,
    Automorphism,
    Diagnose,
    Repro,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Gram => "gram",
            Command::PickNorm => "pick-norm",
            Command::Distance => "distance",
            Command::Curve => "curve",
            Command::Automorphism => "automorphism",
            Command::Diagnose => "diagnose",
            Command::Repro => "repro",
        }
    }
}

/// Self-contained description of a run; echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Invocation {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub document: Option<InputDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repro_id: Option<String>,
    pub options: Options,
}

impl Invocation {
    pub fn command(command: Command, document: InputDoc, options: Options) -> Self {
        Self {
            command,
            document: Some(document),
            repro_id: None,
            options,
        }
    }

    pub fn repro(id: &str, options: Options) -> Self {
        Self {
            command: Command::Repro,
            document: None,
            repro_id: Some(id.to_string()),
            options,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    /// Schema or validation failure; exit status 2.
    #[error("{0}")]
    Usage(String),
    /// The computation itself failed; exit status 1.
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BracketSearch { .. } | Error::TruncationExceeded { .. } => {
                CliError::Compute(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Runs an invocation; `repro all` yields one report per registry case,
/// ordered by id.
pub fn execute(inv: &Invocation) -> Result<Vec<Report>, CliError> {
    if inv.command == Command::Repro {
        let id = inv
            .repro_id
            .as_deref()
            .ok_or_else(|| CliError::Usage("repro needs a case id".into()))?;
        return registry::run(id, &inv.options);
    }
    let doc = inv.document.as_ref().ok_or_else(|| {
        CliError::Usage(format!("{} needs an input document", inv.command.name()))
    })?;
    let start = Instant::now();
    let outcome = commands::run(inv.command, doc, &inv.options)?;
    Ok(vec![outcome.into_report(
        inv.command.name(),
        None,
        inv.clone(),
        start.elapsed().as_secs_f64(),
    )])
}

/// Exit status for a batch of reports: 0 if all pass, 1 otherwise.
pub fn exit_code(reports: &[Report]) -> i32 {
    if reports.iter().all(|r| r.pass) {
        0
    } else {
        1
    }
}
