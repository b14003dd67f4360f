use ddpath::simpath::{RunStats, Verdict, VerifyRun};
use serde::{Deserialize, Serialize};

/// JSON document printed by `simulate` and `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub circuit: CircuitInfo,
    pub strategy: String,
    /// For `verify`, the run with the largest peak.
    pub stats: RunStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs: Option<Vec<VerifyRun>>,
    #[serde(default)]
    pub amplitudes: Vec<Amplitude>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitInfo {
    pub source: String,
    pub qubits: usize,
    /// Gates in the simulated circuit (`|G̃|` for verify).
    pub gates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub bits: String,
    pub re: f64,
    pub im: f64,
}
