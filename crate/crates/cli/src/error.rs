use std::fmt;

use ddpath::circuit::CircuitError;
use ddpath::dd::DdError;
use ddpath::simpath::{PathError, SimError};
use ddpath::tn::TnError;
use serde::Serialize;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Error printed as JSON on stderr.
#[derive(Debug, Serialize)]
pub struct CliError {
    #[serde(skip)]
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<usize>,
}

impl CliError {
    pub fn input(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            kind,
            message: message.into(),
            task: None,
        }
    }

    pub fn io(what: &str, err: std::io::Error) -> Self {
        CliError::input("io", format!("{what}: {err}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        CliError::input("circuit", e.to_string())
    }
}

impl From<PathError> for CliError {
    fn from(e: PathError) -> Self {
        CliError {
            task: e.task(),
            ..CliError::input("path", e.to_string())
        }
    }
}

impl From<TnError> for CliError {
    fn from(e: TnError) -> Self {
        match e {
            TnError::Import { step, .. } => CliError {
                task: Some(step),
                ..CliError::input("plan", e.to_string())
            },
            TnError::Path(p) => p.into(),
            other => CliError::input("plan", other.to_string()),
        }
    }
}

impl From<DdError> for CliError {
    fn from(e: DdError) -> Self {
        CliError {
            code: EXIT_INTERNAL,
            kind: "internal",
            message: e.to_string(),
            task: None,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Path(p) => p.into(),
            SimError::Circuit(c) => c.into(),
            SimError::Dd(d) => d.into(),
        }
    }
}
