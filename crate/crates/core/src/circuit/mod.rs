//! Circuit intermediate representation.
//!
//! A [`Circuit`] is a qubit count plus an ordered gate list; `gates[0]` is
//! applied first. Controlled gates are expressed as a base [`GateKind`] with
//! a non-empty control list, so `cx` is `X` with one control and `cp(θ)` is
//! `P(θ)` with one control.

mod generators;
mod qasm;
mod transpile;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generators::{
    deutsch_jozsa, entangled_qft, ghz, graph_state, qft, random_circuit, ring_edges, w_state,
    Generator,
};
pub use qasm::{emit_qasm, parse_qasm};
pub use transpile::{cost_table, decomposition_cost, transpile, CostTable, GateSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Base operation of a gate, with its angle parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    SX,
    SXdg,
    P(f64),
    RY(f64),
    RZ(f64),
    /// Generic single-qubit unitary `U(θ, φ, λ)` in the OpenQASM convention.
    U(f64, f64, f64),
    Swap,
}

/// Parameter-free tag of a [`GateKind`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateTag {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    SX,
    SXdg,
    P,
    RY,
    RZ,
    U,
    Swap,
}

impl GateTag {
    pub fn qasm_name(self) -> &'static str {
        match self {
            GateTag::X => "x",
            GateTag::Y => "y",
            GateTag::Z => "z",
            GateTag::H => "h",
            GateTag::S => "s",
            GateTag::Sdg => "sdg",
            GateTag::T => "t",
            GateTag::Tdg => "tdg",
            GateTag::SX => "sx",
            GateTag::SXdg => "sxdg",
            GateTag::P => "p",
            GateTag::RY => "ry",
            GateTag::RZ => "rz",
            GateTag::U => "u3",
            GateTag::Swap => "swap",
        }
    }
}

/// A gate kind together with its number of controls, e.g. `cx` or `ccz`.
///
/// This is the key of decomposition-cost tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateClass {
    pub tag: GateTag,
    pub controls: usize,
}

impl GateClass {
    pub const fn new(tag: GateTag, controls: usize) -> Self {
        GateClass { tag, controls }
    }
}

impl fmt::Display for GateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for _ in 0..self.controls {
            f.write_str("c")?;
        }
        f.write_str(self.tag.qasm_name())
    }
}

impl GateKind {
    pub fn tag(&self) -> GateTag {
        match self {
            GateKind::X => GateTag::X,
            GateKind::Y => GateTag::Y,
            GateKind::Z => GateTag::Z,
            GateKind::H => GateTag::H,
            GateKind::S => GateTag::S,
            GateKind::Sdg => GateTag::Sdg,
            GateKind::T => GateTag::T,
            GateKind::Tdg => GateTag::Tdg,
            GateKind::SX => GateTag::SX,
            GateKind::SXdg => GateTag::SXdg,
            GateKind::P(_) => GateTag::P,
            GateKind::RY(_) => GateTag::RY,
            GateKind::RZ(_) => GateTag::RZ,
            GateKind::U(..) => GateTag::U,
            GateKind::Swap => GateTag::Swap,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            GateKind::P(t) | GateKind::RY(t) | GateKind::RZ(t) => vec![t],
            GateKind::U(t, p, l) => vec![t, p, l],
            _ => Vec::new(),
        }
    }

    pub fn is_parameterized(&self) -> bool {
        !self.params().is_empty()
    }

    /// Number of target qubits the kind acts on.
    pub fn target_count(&self) -> usize {
        match self {
            GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn inverse(&self) -> GateKind {
        match *self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::SX => GateKind::SXdg,
            GateKind::SXdg => GateKind::SX,
            GateKind::P(t) => GateKind::P(-t),
            GateKind::RY(t) => GateKind::RY(-t),
            GateKind::RZ(t) => GateKind::RZ(-t),
            GateKind::U(t, p, l) => GateKind::U(-t, -l, -p),
            k @ (GateKind::X
            | GateKind::Y
            | GateKind::Z
            | GateKind::H
            | GateKind::Swap) => k,
        }
    }

    /// The 2×2 matrix `[u00, u01, u10, u11]` of a single-qubit kind.
    ///
    /// Returns `None` for [`GateKind::Swap`].
    pub fn matrix(&self) -> Option<[Complex64; 4]> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let phase = |t: f64| Complex64::from_polar(1.0, t);
        let m = match *self {
            GateKind::X => [c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
            GateKind::Y => [c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)],
            GateKind::Z => [c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
            GateKind::H => {
                let h = FRAC_1_SQRT_2;
                [c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)]
            }
            GateKind::S => [c(1., 0.), c(0., 0.), c(0., 0.), c(0., 1.)],
            GateKind::Sdg => [c(1., 0.), c(0., 0.), c(0., 0.), c(0., -1.)],
            GateKind::T => [c(1., 0.), c(0., 0.), c(0., 0.), phase(std::f64::consts::FRAC_PI_4)],
            GateKind::Tdg => [
                c(1., 0.),
                c(0., 0.),
                c(0., 0.),
                phase(-std::f64::consts::FRAC_PI_4),
            ],
            GateKind::SX => [c(0.5, 0.5), c(0.5, -0.5), c(0.5, -0.5), c(0.5, 0.5)],
            GateKind::SXdg => [c(0.5, -0.5), c(0.5, 0.5), c(0.5, 0.5), c(0.5, -0.5)],
            GateKind::P(t) => [c(1., 0.), c(0., 0.), c(0., 0.), phase(t)],
            GateKind::RY(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [c(co, 0.), c(-s, 0.), c(s, 0.), c(co, 0.)]
            }
            GateKind::RZ(t) => [phase(-t / 2.0), c(0., 0.), c(0., 0.), phase(t / 2.0)],
            GateKind::U(t, p, l) => {
                let (s, co) = (t / 2.0).sin_cos();
                [
                    c(co, 0.),
                    -phase(l) * s,
                    phase(p) * s,
                    phase(p + l) * co,
                ]
            }
            GateKind::Swap => return None,
        };
        Some(m)
    }
}

/// A gate application: base kind, positive controls and targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub controls: Vec<usize>,
    pub targets: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Self {
        Gate {
            kind,
            controls: Vec::new(),
            targets,
        }
    }

    pub fn controlled(kind: GateKind, controls: Vec<usize>, targets: Vec<usize>) -> Self {
        Gate {
            kind,
            controls,
            targets,
        }
    }

    pub fn single(kind: GateKind, target: usize) -> Self {
        Gate::new(kind, vec![target])
    }

    pub fn h(q: usize) -> Self {
        Gate::single(GateKind::H, q)
    }

    pub fn x(q: usize) -> Self {
        Gate::single(GateKind::X, q)
    }

    pub fn p(theta: f64, q: usize) -> Self {
        Gate::single(GateKind::P(theta), q)
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate::controlled(GateKind::X, vec![control], vec![target])
    }

    pub fn cz(control: usize, target: usize) -> Self {
        Gate::controlled(GateKind::Z, vec![control], vec![target])
    }

    pub fn cp(theta: f64, control: usize, target: usize) -> Self {
        Gate::controlled(GateKind::P(theta), vec![control], vec![target])
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate::new(GateKind::Swap, vec![a, b])
    }

    pub fn class(&self) -> GateClass {
        GateClass::new(self.kind.tag(), self.controls.len())
    }

    pub fn inverse(&self) -> Gate {
        Gate {
            kind: self.kind.inverse(),
            controls: self.controls.clone(),
            targets: self.targets.clone(),
        }
    }

    /// All qubits the gate touches, controls first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().chain(self.targets.iter()).copied()
    }

    /// Checks arity, index range and distinctness against an `n`-qubit register.
    pub fn validate(&self, n: usize) -> Result<(), CircuitError> {
        if self.targets.len() != self.kind.target_count() {
            return Err(CircuitError::InvalidArgument(format!(
                "{} expects {} target(s), got {}",
                self.class(),
                self.kind.target_count(),
                self.targets.len()
            )));
        }
        let mut seen = vec![false; n];
        for q in self.qubits() {
            if q >= n {
                return Err(CircuitError::InvalidArgument(format!(
                    "qubit {q} out of range for {n} qubit(s) in {}",
                    self.class()
                )));
            }
            if std::mem::replace(&mut seen[q], true) {
                return Err(CircuitError::InvalidArgument(format!(
                    "qubit {q} used twice in {}",
                    self.class()
                )));
            }
        }
        if let Some(bad) = self.kind.params().iter().find(|p| !p.is_finite()) {
            return Err(CircuitError::InvalidArgument(format!(
                "non-finite angle {bad} in {}",
                self.class()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.class())?;
        let params = self.kind.params();
        if !params.is_empty() {
            let rendered: Vec<String> = params.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", rendered.join(","))?;
        }
        let qubits: Vec<String> = self.qubits().map(|q| format!("q[{q}]")).collect();
        write!(f, " {}", qubits.join(","))
    }
}

/// An `n`-qubit circuit; gates are stored in application order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit {
            n,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut c = Circuit::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        gate.validate(self.n)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Gate `k` in 1-based path numbering (position 0 is the initial state).
    pub fn gate_at(&self, position: usize) -> Option<&Gate> {
        position.checked_sub(1).and_then(|i| self.gates.get(i))
    }

    /// Reverses the gate order and replaces every gate by its inverse.
    pub fn invert(&self) -> Circuit {
        Circuit {
            n: self.n,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Builds `self · other⁻¹`: the gates of `self` followed by the inverse of `other`.
    pub fn concat_inverse(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        if self.n != other.n {
            return Err(CircuitError::InvalidArgument(format!(
                "qubit count mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        let mut gates = self.gates.clone();
        gates.extend(other.invert().gates);
        Ok(Circuit { n: self.n, gates })
    }
}
