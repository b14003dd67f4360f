//! Dense state-vector reference simulator.
//!
//! This module is the ground truth the decision-diagram kernel is checked
//! against. It shares nothing with [`crate::dd`] beyond the complex-number
//! type and the 2×2 gate matrices of [`crate::circuit::GateKind`].

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};

/// Largest register [`simulate`] accepts.
pub const MAX_SIMULATE_QUBITS: usize = 14;
/// Largest register [`gate_matrix`] accepts.
pub const MAX_MATRIX_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("capacity exceeded: {requested} qubits requested, at most {limit} supported")]
    Capacity { requested: usize, limit: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Dense `2^n` amplitudes; index bit `k` is qubit `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn basis(bits: &str) -> Result<Self, OracleError> {
        let n = bits.len();
        if n == 0 {
            return Err(OracleError::InvalidArgument("empty basis string".into()));
        }
        if n > MAX_SIMULATE_QUBITS {
            return Err(OracleError::Capacity {
                requested: n,
                limit: MAX_SIMULATE_QUBITS,
            });
        }
        let mut index = 0usize;
        for c in bits.chars() {
            index = index << 1
                | match c {
                    '0' => 0,
                    '1' => 1,
                    other => {
                        return Err(OracleError::InvalidArgument(format!(
                            "invalid character '{other}' in basis string"
                        )))
                    }
                };
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(DenseState { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, OracleError> {
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(OracleError::InvalidArgument(format!(
                "amplitude count must be a power of two ≥ 2, got {}",
                amps.len()
            )));
        }
        let n = amps.len().trailing_zeros() as usize;
        Ok(DenseState { n, amps })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of a most-significant-first bitstring.
    pub fn amplitude(&self, bits: &str) -> Option<Complex64> {
        if bits.len() != self.n {
            return None;
        }
        usize::from_str_radix(bits, 2).ok().map(|i| self.amps[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DenseState) -> Result<Complex64, OracleError> {
        check_same(self, other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Applies one gate in place by strided amplitude updates.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), OracleError> {
        gate.validate(self.n)
            .map_err(|e| OracleError::InvalidArgument(e.to_string()))?;
        let ctrl_mask: usize = gate.controls.iter().map(|&c| 1usize << c).sum();
        match gate.kind.matrix() {
            Some(u) => {
                let t = 1usize << gate.targets[0];
                for i in 0..self.amps.len() {
                    if i & t != 0 || i & ctrl_mask != ctrl_mask {
                        continue;
                    }
                    let (a0, a1) = (self.amps[i], self.amps[i | t]);
                    self.amps[i] = u[0] * a0 + u[1] * a1;
                    self.amps[i | t] = u[2] * a0 + u[3] * a1;
                }
            }
            None => {
                let (a, b) = (1usize << gate.targets[0], 1usize << gate.targets[1]);
                for i in 0..self.amps.len() {
                    if i & a != 0 && i & b == 0 && i & ctrl_mask == ctrl_mask {
                        self.amps.swap(i, i ^ a ^ b);
                    }
                }
            }
        }
        Ok(())
    }

    /// Amplitude dump as `[[re, im], …]`.
    pub fn to_json(&self) -> String {
        let pairs: Vec<[f64; 2]> = self.amps.iter().map(|a| [a.re, a.im]).collect();
        serde_json::to_string(&pairs).expect("finite floats serialize")
    }
}

fn check_same(a: &DenseState, b: &DenseState) -> Result<(), OracleError> {
    if a.n != b.n {
        return Err(OracleError::InvalidArgument(format!(
            "size mismatch: {} vs {} qubits",
            a.n, b.n
        )));
    }
    Ok(())
}

/// Simulates `c` gate by gate from a basis state.
pub fn simulate(c: &Circuit, initial: &str) -> Result<DenseState, OracleError> {
    if c.qubits() > MAX_SIMULATE_QUBITS {
        return Err(OracleError::Capacity {
            requested: c.qubits(),
            limit: MAX_SIMULATE_QUBITS,
        });
    }
    if initial.len() != c.qubits() {
        return Err(OracleError::InvalidArgument(format!(
            "initial state has {} bit(s), circuit has {} qubit(s)",
            initial.len(),
            c.qubits()
        )));
    }
    let mut s = DenseState::basis(initial)?;
    for g in c.gates() {
        s.apply(g)?;
    }
    Ok(s)
}

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub dim: usize,
    pub entries: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        DenseMatrix { dim, entries }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        let d = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    entries[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        DenseMatrix { dim: d, entries }
    }

    pub fn dagger(&self) -> DenseMatrix {
        let d = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entries[i * d + j].conj();
            }
        }
        DenseMatrix { dim: d, entries }
    }

    /// Largest entry-wise deviation from `other`.
    pub fn max_deviation(&self, other: &DenseMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// The explicit `2^n × 2^n` matrix of `gate`, built column by column from
/// the gate's action on each basis state.
pub fn gate_matrix(gate: &Gate, n: usize) -> Result<DenseMatrix, OracleError> {
    if n > MAX_MATRIX_QUBITS {
        return Err(OracleError::Capacity {
            requested: n,
            limit: MAX_MATRIX_QUBITS,
        });
    }
    gate.validate(n)
        .map_err(|e| OracleError::InvalidArgument(e.to_string()))?;
    let dim = 1usize << n;
    let mut m = DenseMatrix {
        dim,
        entries: vec![Complex64::new(0.0, 0.0); dim * dim],
    };
    let controls_set = |col: usize| gate.controls.iter().all(|&c| col >> c & 1 == 1);
    for col in 0..dim {
        if !controls_set(col) {
            m.entries[col * dim + col] = Complex64::new(1.0, 0.0);
            continue;
        }
        match gate.kind.matrix() {
            Some(u) => {
                let t = gate.targets[0];
                let in_bit = col >> t & 1;
                for out_bit in 0..2 {
                    let row = (col & !(1 << t)) | out_bit << t;
                    m.entries[row * dim + col] = u[out_bit * 2 + in_bit];
                }
            }
            None => {
                let (a, b) = (gate.targets[0], gate.targets[1]);
                let (ba, bb) = (col >> a & 1, col >> b & 1);
                let row = (col & !(1 << a) & !(1 << b)) | ba << b | bb << a;
                m.entries[row * dim + col] = Complex64::new(1.0, 0.0);
            }
        }
    }
    Ok(m)
}

/// Full unitary of a circuit as a product of explicit gate matrices.
pub fn circuit_matrix(c: &Circuit) -> Result<DenseMatrix, OracleError> {
    let mut acc = DenseMatrix::identity(1 << c.qubits());
    for g in c.gates() {
        acc = gate_matrix(g, c.qubits())?.mul(&acc);
    }
    Ok(acc)
}

/// Largest per-amplitude deviation between `a` and `b`.
///
/// With `up_to_global_phase`, `b` is first rotated by the unit phase that
/// aligns its largest-magnitude amplitude with the corresponding one in `a`.
pub fn compare_states(a: &DenseState, b: &DenseState, up_to_global_phase: bool) -> Result<f64, OracleError> {
    check_same(a, b)?;
    let phase = if up_to_global_phase {
        let (idx, _) = b
            .amps
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, x)| if x.norm() > best.1 { (i, x.norm()) } else { best });
        let (ra, rb) = (a.amps[idx], b.amps[idx]);
        if ra.norm() > 0.0 && rb.norm() > 0.0 {
            (ra / ra.norm()) / (rb / rb.norm())
        } else {
            Complex64::new(1.0, 0.0)
        }
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x - y * phase).norm())
        .fold(0.0, f64::max))
}

/// `|⟨a|b⟩|`.
pub fn fidelity(a: &DenseState, b: &DenseState) -> Result<f64, OracleError> {
    Ok(a.inner(b)?.norm())
}
