//! Simulation paths: orders in which the initial state and the gate matrices
//! of a circuit are multiplied together.
//!
//! Index `0` is the initial state, `1..=|G|` are the gates in application
//! order and task `k` (0-based) produces index `|G| + 1 + k`. Every index
//! stands for a set of original positions. Two operands may be combined when
//! their positions are adjacent, or when every gate they would skip over
//! acts on qubits disjoint from both operands.

mod exec;
mod strategy;

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError};
use crate::dd::DdError;

pub use exec::{
    execute, verify, ExecOptions, Execution, InitialState, RunStats, Strategy, TaskEvent,
    TaskStat, Verdict, Verification, VerifyRun, FIDELITY_THRESHOLD,
};
pub use strategy::{alternating, heuristic, heuristic_schedule, outward};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("expected {expected} tasks, found {found}")]
    TaskCount { expected: usize, found: usize },
    #[error("task {task}: index {index} does not exist yet")]
    UnknownIndex { task: usize, index: usize },
    #[error("task {task}: index {index} was already consumed")]
    ReusedIndex { task: usize, index: usize },
    #[error("task {task}: operands {a} and {b} are not adjacent and do not commute past {blocker}")]
    NonAdjacent {
        task: usize,
        a: usize,
        b: usize,
        blocker: usize,
    },
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
}

impl PathError {
    /// The offending task, if the error is tied to one.
    pub fn task(&self) -> Option<usize> {
        match self {
            PathError::UnknownIndex { task, .. }
            | PathError::ReusedIndex { task, .. }
            | PathError::NonAdjacent { task, .. } => Some(*task),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Dd(#[from] DdError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// An ordered list of pairwise multiplication tasks.
///
/// Pairs are unordered; which operand becomes the left factor is derived
/// during validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationPath {
    pub gate_count: usize,
    #[serde(rename = "path")]
    pub tasks: Vec<(usize, usize)>,
}

impl SimulationPath {
    pub fn new(gate_count: usize, tasks: Vec<(usize, usize)>) -> Self {
        SimulationPath { gate_count, tasks }
    }

    /// Gate-by-gate matrix-vector simulation:
    /// `[(0,1), (2,|G|+1), (3,|G|+2), …]`.
    pub fn sequential(gate_count: usize) -> Result<Self, PathError> {
        if gate_count == 0 {
            return Err(PathError::InvalidArgument(
                "a sequential path needs at least one gate".into(),
            ));
        }
        let mut tasks = vec![(0, 1)];
        for k in 2..=gate_count {
            tasks.push((k, gate_count + k - 1));
        }
        Ok(SimulationPath { gate_count, tasks })
    }

    /// Index produced by task `k`.
    pub fn result_index(&self, k: usize) -> usize {
        self.gate_count + 1 + k
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("path serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, PathError> {
        serde_json::from_str(s).map_err(|e| PathError::InvalidArgument(format!("bad path JSON: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractionKind {
    MatrixVector,
    MatrixMatrix,
}

/// A validated task: `result = left · right`, where `right` is applied first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contraction {
    pub left: usize,
    pub right: usize,
    pub result: usize,
    pub kind: ContractionKind,
    /// Smallest and largest original position covered by the result.
    pub span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedPath {
    gate_count: usize,
    contractions: Vec<Contraction>,
}

impl ValidatedPath {
    pub fn gate_count(&self) -> usize {
        self.gate_count
    }

    pub fn contractions(&self) -> &[Contraction] {
        &self.contractions
    }

    /// Index of the final state, `0` for an empty circuit.
    pub fn final_index(&self) -> usize {
        self.contractions.last().map_or(0, |c| c.result)
    }
}

struct Operand {
    positions: FixedBitSet,
    min: usize,
    max: usize,
}

/// Qubit supports by position; `None` makes every pair of positions conflict,
/// which reduces validation to strict adjacency.
struct Supports(Option<Vec<FixedBitSet>>);

impl Supports {
    fn from_circuit(c: &Circuit) -> Self {
        let n = c.qubits();
        let mut v = Vec::with_capacity(c.len() + 1);
        // The state is always the rightmost factor and never needs to
        // commute with anything, so it contributes no support.
        v.push(FixedBitSet::with_capacity(n));
        for g in c.gates() {
            let mut s = FixedBitSet::with_capacity(n);
            g.qubits().for_each(|q| s.insert(q));
            v.push(s);
        }
        Supports(Some(v))
    }

    fn pair_disjoint(&self, a: usize, b: usize) -> bool {
        match &self.0 {
            Some(v) => v[a].is_disjoint(&v[b]),
            None => false,
        }
    }

}

/// Validates `path` against the gate supports of `circuit`, allowing the
/// commuting bypass for disjoint-support gates.
pub fn validate(path: &SimulationPath, circuit: &Circuit) -> Result<ValidatedPath, PathError> {
    if path.gate_count != circuit.len() {
        return Err(PathError::InvalidArgument(format!(
            "path is for {} gates, circuit has {}",
            path.gate_count,
            circuit.len()
        )));
    }
    validate_with(path, &Supports::from_circuit(circuit))
}

/// Validates `path` using strict interval adjacency only.
pub fn validate_structure(path: &SimulationPath) -> Result<ValidatedPath, PathError> {
    validate_with(path, &Supports(None))
}

fn validate_with(path: &SimulationPath, sup: &Supports) -> Result<ValidatedPath, PathError> {
    let g = path.gate_count;
    if path.tasks.len() != g {
        return Err(PathError::TaskCount {
            expected: g,
            found: path.tasks.len(),
        });
    }
    let mut slots: Vec<Option<Operand>> = (0..=g)
        .map(|p| {
            let mut positions = FixedBitSet::with_capacity(g + 1);
            positions.insert(p);
            Some(Operand {
                positions,
                min: p,
                max: p,
            })
        })
        .collect();
    let mut contractions = Vec::with_capacity(g);
    for (task, &(a, b)) in path.tasks.iter().enumerate() {
        for idx in [a, b] {
            if idx >= slots.len() {
                return Err(PathError::UnknownIndex { task, index: idx });
            }
        }
        if a == b || slots[a].is_none() {
            return Err(PathError::ReusedIndex { task, index: a });
        }
        if slots[b].is_none() {
            return Err(PathError::ReusedIndex { task, index: b });
        }
        let oa = slots[a].take().unwrap();
        let ob = slots[b].take().unwrap();
        let ((right, r), (left, l)) = if oa.min < ob.min {
            ((a, oa), (b, ob))
        } else {
            ((b, ob), (a, oa))
        };
        if let Some(blocker) = conflict(&l, &r, sup) {
            return Err(PathError::NonAdjacent { task, a, b, blocker });
        }
        let kind = if r.min == 0 {
            ContractionKind::MatrixVector
        } else {
            ContractionKind::MatrixMatrix
        };
        let mut merged = r;
        merged.positions.union_with(&l.positions);
        merged.max = merged.max.max(l.max);
        let result = g + 1 + task;
        contractions.push(Contraction {
            left,
            right,
            result,
            kind,
            span: (merged.min, merged.max),
        });
        slots.push(Some(merged));
    }
    Ok(ValidatedPath {
        gate_count: g,
        contractions,
    })
}

/// First position that prevents `left · right` from equalling the in-order
/// product of their union, or `None` if the merge is sound.
fn conflict(left: &Operand, right: &Operand, sup: &Supports) -> Option<usize> {
    // Positions of `left` that precede positions of `right` get reordered.
    for l in left.positions.ones().take_while(|&l| l < right.max) {
        for r in right.positions.ones().filter(|&r| r > l) {
            if !sup.pair_disjoint(l, r) {
                return Some(l);
            }
        }
    }
    // A skipped gate is applied after the merged product, so it must
    // commute with every gate of the product that it overtakes.
    let lo = right.min;
    let hi = left.max.max(right.max);
    (lo + 1..hi)
        .filter(|&p| !right.positions.contains(p) && !left.positions.contains(p))
        .find(|&p| {
            right
                .positions
                .ones()
                .chain(left.positions.ones())
                .any(|q| q > p && !sup.pair_disjoint(p, q))
        })
}

/// Dependency structure of a validated path.
#[derive(Debug, Clone)]
pub struct TaskGraph {
    deps: Vec<Vec<usize>>,
    dependents: Vec<Vec<usize>>,
}

impl TaskGraph {
    pub fn new(path: &ValidatedPath) -> Self {
        let g = path.gate_count;
        let n = path.contractions.len();
        let mut deps = vec![Vec::new(); n];
        let mut dependents = vec![Vec::new(); n];
        for (t, c) in path.contractions.iter().enumerate() {
            for idx in [c.left, c.right] {
                if idx > g {
                    let producer = idx - g - 1;
                    deps[t].push(producer);
                    dependents[producer].push(t);
                }
            }
        }
        deps.iter_mut().for_each(|d| d.sort_unstable());
        TaskGraph { deps, dependents }
    }

    pub fn len(&self) -> usize {
        self.deps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deps.is_empty()
    }

    pub fn dependencies(&self, task: usize) -> &[usize] {
        &self.deps[task]
    }

    pub fn dependents(&self, task: usize) -> &[usize] {
        &self.dependents[task]
    }

    /// Tasks whose operands are all leaves (state or gates).
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&t| self.deps[t].is_empty()).collect()
    }

    /// Kahn's algorithm, lowest ready task first.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut indegree: Vec<usize> = self.deps.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> = self.leaves().into_iter().map(Reverse).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(Reverse(t)) = ready.pop() {
            order.push(t);
            for &d in &self.dependents[t] {
                indegree[d] -= 1;
                if indegree[d] == 0 {
                    ready.push(Reverse(d));
                }
            }
        }
        order
    }
}

impl fmt::Display for SimulationPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.tasks.iter().map(|(a, b)| format!("({a},{b})")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests;
