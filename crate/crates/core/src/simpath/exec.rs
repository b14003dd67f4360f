use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{cost_table, ghz, Circuit, GateSet};
use crate::dd::{DdKind, Edge, Kernel};

use super::{
    alternating, heuristic, validate, ContractionKind, PathError, SimError, SimulationPath, TaskGraph,
    ValidatedPath,
};

/// `|⟨φ|G̃|φ⟩|` at or above this counts as "maps φ to itself".
pub const FIDELITY_THRESHOLD: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecOptions {
    /// Collect garbage once the kernel holds more live nodes than this.
    /// The threshold doubles whenever a collection frees too little.
    pub gc_threshold: usize,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            gc_threshold: 1 << 18,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskStat {
    pub task_index: usize,
    pub result_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub tasks: Vec<TaskStat>,
    pub peak_nodes: usize,
    pub final_nodes: usize,
    pub task_count: usize,
    pub elapsed_ns: u64,
}

/// What the executor reports to an observer after each task.
#[derive(Debug, Clone, Copy)]
pub struct TaskEvent {
    pub task_index: usize,
    pub result_index: usize,
    pub kind: ContractionKind,
    pub span: (usize, usize),
    pub result: Edge,
    pub result_nodes: usize,
}

#[derive(Debug, Clone)]
pub struct Execution {
    /// Final state. It holds one reference in the kernel; release it with
    /// [`Kernel::dec_ref`] when done.
    pub state: Edge,
    pub stats: RunStats,
}

/// Runs `path` over `circuit` starting from `initial`.
///
/// Tasks run in topological order on the single kernel. Intermediate results
/// are pinned while live and released as soon as they are consumed.
pub fn execute(
    kernel: &mut Kernel,
    circuit: &Circuit,
    initial: Edge,
    path: &ValidatedPath,
    options: &ExecOptions,
    mut observer: impl FnMut(&Kernel, &TaskEvent),
) -> Result<Execution, SimError> {
    let start = Instant::now();
    let n = circuit.qubits();
    let g = path.gate_count();
    if g != circuit.len() {
        return Err(PathError::InvalidArgument(format!(
            "path is for {g} gates, circuit has {}",
            circuit.len()
        ))
        .into());
    }
    if kernel.kind(initial) != Some(DdKind::Vector) || kernel.qubits(initial) != n {
        return Err(PathError::InvalidArgument(format!("initial state must be a {n}-qubit vector")).into());
    }
    let contractions = path.contractions();
    let mut slots: Vec<Option<Edge>> = vec![None; g + 1 + contractions.len()];
    kernel.inc_ref(initial);
    slots[0] = Some(initial);
    let mut peak = kernel.node_count(initial);
    let mut threshold = options.gc_threshold;
    let mut tasks = Vec::with_capacity(contractions.len());

    for t in TaskGraph::new(path).topological_order() {
        let c = contractions[t];
        let mut operand = |kernel: &mut Kernel, idx: usize| -> Result<Edge, SimError> {
            if let Some(e) = slots[idx].take() {
                return Ok(e);
            }
            let gate = circuit
                .gate_at(idx)
                .ok_or_else(|| PathError::InvalidArgument(format!("index {idx} has no value")))?;
            let e = kernel.gate(gate, n)?;
            kernel.inc_ref(e);
            peak = peak.max(kernel.node_count(e));
            Ok(e)
        };
        let left = operand(kernel, c.left)?;
        let right = operand(kernel, c.right)?;
        let result = kernel.multiply(left, right)?;
        kernel.inc_ref(result);
        kernel.dec_ref(left);
        kernel.dec_ref(right);
        slots[c.result] = Some(result);

        let nodes = kernel.node_count(result);
        peak = peak.max(nodes);
        tasks.push(TaskStat {
            task_index: t,
            result_nodes: nodes,
        });
        observer(
            kernel,
            &TaskEvent {
                task_index: t,
                result_index: c.result,
                kind: c.kind,
                span: c.span,
                result,
                result_nodes: nodes,
            },
        );
        if kernel.live_nodes() > threshold {
            kernel.collect();
            threshold = threshold.max(2 * kernel.live_nodes());
        }
    }

    let state = slots[path.final_index()].expect("final result present");
    let final_nodes = kernel.node_count(state);
    Ok(Execution {
        state,
        stats: RunStats {
            task_count: tasks.len(),
            tasks,
            peak_nodes: peak,
            final_nodes,
            elapsed_ns: start.elapsed().as_nanos() as u64,
        },
    })
}

/// A verification input state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitialState {
    Zero,
    Ghz,
    Bits(String),
}

impl InitialState {
    /// Parses `zero`, `ghz`, `bits:<b…>` or `basis:K` for an `n`-qubit register.
    ///
    /// `basis:K` yields `K` classical states: all zeros, all ones, the two
    /// alternating patterns, then seeded pseudo-random bitstrings.
    pub fn parse_list(spec: &str, n: usize) -> Result<Vec<InitialState>, PathError> {
        let bad = |m: String| PathError::InvalidArgument(m);
        match spec {
            "zero" => Ok(vec![InitialState::Zero]),
            "ghz" => Ok(vec![InitialState::Ghz]),
            _ => {
                if let Some(bits) = spec.strip_prefix("bits:") {
                    if bits.len() != n || !bits.chars().all(|c| c == '0' || c == '1') {
                        return Err(bad(format!("'{bits}' is not a {n}-bit string")));
                    }
                    return Ok(vec![InitialState::Bits(bits.to_string())]);
                }
                let k: usize = spec
                    .strip_prefix("basis:")
                    .and_then(|k| k.parse().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| bad(format!("unknown initial state '{spec}'")))?;
                Ok(basis_states(n, k).into_iter().map(InitialState::Bits).collect())
            }
        }
    }

    pub fn build(&self, kernel: &mut Kernel, n: usize) -> Result<Edge, SimError> {
        match self {
            InitialState::Zero => Ok(kernel.zero_state(n)?),
            InitialState::Bits(b) => Ok(kernel.basis_state(b)?),
            InitialState::Ghz => {
                let mut s = kernel.zero_state(n)?;
                for gate in ghz(n)?.gates() {
                    let m = kernel.gate(gate, n)?;
                    s = kernel.multiply_mv(m, s)?;
                }
                Ok(s)
            }
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Zero => f.write_str("zero"),
            InitialState::Ghz => f.write_str("ghz"),
            InitialState::Bits(b) => write!(f, "bits:{b}"),
        }
    }
}

fn basis_states(n: usize, k: usize) -> Vec<String> {
    let pattern = |first: char, second: char| -> String {
        (0..n).map(|i| if i % 2 == 0 { first } else { second }).collect()
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for s in [
        "0".repeat(n),
        "1".repeat(n),
        pattern('0', '1'),
        pattern('1', '0'),
    ] {
        if out.len() < k && seen.insert(s.clone()) {
            out.push(s);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let distinct = if n >= 63 { usize::MAX } else { 1usize << n };
    while out.len() < k.min(distinct) {
        let s: String = (0..n).map(|_| if rng.gen::<bool>() { '1' } else { '0' }).collect();
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    Alternating,
    Heuristic,
    Plan(SimulationPath),
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Sequential => "sequential",
            Strategy::Alternating => "alternating",
            Strategy::Heuristic => "heuristic",
            Strategy::Plan(_) => "plan",
        }
    }

    /// Simulation path for `G · G′⁻¹`.
    ///
    /// The heuristic prices each gate class of `G` by its lowering into the
    /// gate classes of `G′` together with `{H, P, CX}`.
    pub fn path(&self, g: &Circuit, g_prime: &Circuit, combined: &Circuit) -> Result<ValidatedPath, SimError> {
        let path = match self {
            Strategy::Sequential if combined.is_empty() => SimulationPath::new(0, vec![]),
            Strategy::Sequential => SimulationPath::sequential(combined.len())?,
            Strategy::Alternating => alternating(g.len(), g_prime.len())?,
            Strategy::Heuristic => {
                let set = GateSet::new(
                    g_prime
                        .gates()
                        .iter()
                        .map(|x| x.class())
                        .chain(GateSet::default().iter().copied()),
                );
                let costs = cost_table(g, &set).map_err(|e| PathError::UnsupportedGate(e.to_string()))?;
                heuristic(g, g_prime, &costs)?
            }
            Strategy::Plan(p) => p.clone(),
        };
        Ok(validate(&path, combined)?)
    }
}

impl FromStr for Strategy {
    type Err = PathError;

    /// Named strategies only; plans are loaded by the caller.
    fn from_str(s: &str) -> Result<Self, PathError> {
        match s {
            "sequential" => Ok(Strategy::Sequential),
            "alternating" => Ok(Strategy::Alternating),
            "heuristic" => Ok(Strategy::Heuristic),
            other => Err(PathError::InvalidArgument(format!("unknown strategy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRun {
    pub initial: String,
    pub fidelity: f64,
    pub stats: RunStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub strategy: String,
    pub gate_count: usize,
    /// Smallest `|⟨φ|G̃|φ⟩|` over all initial states.
    pub fidelity: f64,
    pub verdict: Verdict,
    pub runs: Vec<VerifyRun>,
}

impl Verification {
    pub fn peak_nodes(&self) -> usize {
        self.runs.iter().map(|r| r.stats.peak_nodes).max().unwrap_or(0)
    }
}

/// Checks `G ≡ G′` up to global phase by running `G · G′⁻¹` on every
/// initial state.
pub fn verify(
    kernel: &mut Kernel,
    g: &Circuit,
    g_prime: &Circuit,
    strategy: &Strategy,
    initials: &[InitialState],
    options: &ExecOptions,
) -> Result<Verification, SimError> {
    if initials.is_empty() {
        return Err(PathError::InvalidArgument("no initial states".into()).into());
    }
    let combined = g.concat_inverse(g_prime)?;
    let path = strategy.path(g, g_prime, &combined)?;
    let n = combined.qubits();
    let mut runs = Vec::with_capacity(initials.len());
    for init in initials {
        let phi = init.build(kernel, n)?;
        kernel.inc_ref(phi);
        let run = execute(kernel, &combined, phi, &path, options, |_, _| {})?;
        let fidelity = kernel.inner_product(phi, run.state)?.norm();
        kernel.dec_ref(run.state);
        kernel.dec_ref(phi);
        runs.push(VerifyRun {
            initial: init.to_string(),
            fidelity,
            stats: run.stats,
        });
    }
    let fidelity = runs.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min);
    Ok(Verification {
        strategy: strategy.name().to_string(),
        gate_count: combined.len(),
        fidelity,
        verdict: if fidelity >= FIDELITY_THRESHOLD {
            Verdict::Consistent
        } else {
            Verdict::Inconsistent
        },
        runs,
    })
}
