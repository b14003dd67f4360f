//! Deterministic benchmark circuit families.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Circuit, CircuitError, Gate, GateKind};

fn require(n: usize, min: usize, name: &str) -> Result<(), CircuitError> {
    if n < min {
        return Err(CircuitError::InvalidArgument(format!(
            "{name} needs at least {min} qubit(s), got {n}"
        )));
    }
    Ok(())
}

/// `H` on `q[0]` followed by a `CX` chain `q[i] → q[i+1]`.
pub fn ghz(n: usize) -> Result<Circuit, CircuitError> {
    require(n, 1, "ghz")?;
    let mut gates = vec![Gate::h(0)];
    gates.extend((0..n - 1).map(|i| Gate::cx(i, i + 1)));
    Circuit::from_gates(n, gates)
}

/// W state via a controlled-RY cascade.
///
/// The excitation starts on `q[0]`; step `k` keeps a `1/(n-k)` share of the
/// remaining weight on `q[k]` and moves the rest to `q[k+1]`.
pub fn w_state(n: usize) -> Result<Circuit, CircuitError> {
    require(n, 1, "wstate")?;
    let mut gates = vec![Gate::x(0)];
    for k in 0..n - 1 {
        let keep = (1.0 / (n - k) as f64).sqrt();
        let theta = 2.0 * keep.acos();
        gates.push(Gate::controlled(GateKind::RY(theta), vec![k], vec![k + 1]));
        gates.push(Gate::cx(k + 1, k));
    }
    Circuit::from_gates(n, gates)
}

/// Ring graph `0-1-…-(n-1)-0`; a single edge for two qubits.
pub fn ring_edges(n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

/// Graph state: `H` on every qubit, then `CZ` per edge.
pub fn graph_state(n: usize, edges: &[(usize, usize)]) -> Result<Circuit, CircuitError> {
    require(n, 1, "graph")?;
    let mut gates: Vec<Gate> = (0..n).map(Gate::h).collect();
    gates.extend(edges.iter().map(|&(a, b)| Gate::cz(a, b)));
    Circuit::from_gates(n, gates)
}

/// Deutsch-Jozsa with the balanced oracle `CX(i → ancilla)` for every input.
///
/// Inputs are `q[0..n-1]`, the ancilla is `q[n-1]`.
pub fn deutsch_jozsa(n: usize) -> Result<Circuit, CircuitError> {
    require(n, 2, "dj")?;
    let anc = n - 1;
    let mut gates = vec![Gate::x(anc)];
    gates.extend((0..n).map(Gate::h));
    gates.extend((0..anc).map(|i| Gate::cx(i, anc)));
    gates.extend((0..anc).map(Gate::h));
    Circuit::from_gates(n, gates)
}

/// Quantum Fourier transform.
///
/// For each qubit `i`: `H q[i]`, then `CP(π/2^(j-i))` with control `q[j]`
/// and target `q[i]` for `j > i`; finally `⌊n/2⌋` swaps reverse the register.
pub fn qft(n: usize) -> Result<Circuit, CircuitError> {
    require(n, 1, "qft")?;
    let mut gates = Vec::with_capacity(n * (n + 1) / 2 + n / 2);
    for i in 0..n {
        gates.push(Gate::h(i));
        for j in i + 1..n {
            gates.push(Gate::cp(PI / (1u64 << (j - i)) as f64, j, i));
        }
    }
    gates.extend((0..n / 2).map(|i| Gate::swap(i, n - 1 - i)));
    Circuit::from_gates(n, gates)
}

/// GHZ preparation followed by the QFT.
pub fn entangled_qft(n: usize) -> Result<Circuit, CircuitError> {
    require(n, 2, "qftentangled")?;
    let mut gates = ghz(n)?.gates;
    gates.extend(qft(n)?.gates);
    Circuit::from_gates(n, gates)
}

/// Seeded random circuit over the whole supported alphabet.
pub fn random_circuit(n: usize, gate_count: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n.max(1));
    let n = c.qubits();
    let pick_distinct = |rng: &mut ChaCha8Rng, k: usize| -> Vec<usize> {
        let mut out = Vec::with_capacity(k);
        while out.len() < k {
            let q = rng.gen_range(0..n);
            if !out.contains(&q) {
                out.push(q);
            }
        }
        out
    };
    for _ in 0..gate_count {
        let angle = rng.gen_range(-PI..PI);
        let singles = [
            GateKind::X,
            GateKind::Y,
            GateKind::Z,
            GateKind::H,
            GateKind::S,
            GateKind::Sdg,
            GateKind::T,
            GateKind::Tdg,
            GateKind::SX,
            GateKind::SXdg,
            GateKind::P(angle),
            GateKind::RY(angle),
            GateKind::RZ(angle),
            GateKind::U(angle, rng.gen_range(-PI..PI), rng.gen_range(-PI..PI)),
        ];
        let choice = if n == 1 { 0 } else { rng.gen_range(0..10) };
        let gate = match choice {
            0..=4 => {
                let kind = singles[rng.gen_range(0..singles.len())];
                Gate::single(kind, rng.gen_range(0..n))
            }
            5 => {
                let q = pick_distinct(&mut rng, 2);
                Gate::cx(q[0], q[1])
            }
            6 => {
                let q = pick_distinct(&mut rng, 2);
                Gate::cz(q[0], q[1])
            }
            7 => {
                let q = pick_distinct(&mut rng, 2);
                Gate::cp(angle, q[0], q[1])
            }
            8 => {
                let q = pick_distinct(&mut rng, 2);
                Gate::swap(q[0], q[1])
            }
            _ => {
                let arity = if n >= 3 { 3 } else { 2 };
                let q = pick_distinct(&mut rng, arity);
                let kind = singles[rng.gen_range(0..singles.len())];
                Gate::controlled(kind, q[1..].to_vec(), vec![q[0]])
            }
        };
        c.push(gate).expect("random gate respects register bounds");
    }
    c
}

/// Named generator families, as used in `name:n` circuit specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    Ghz,
    WState,
    Graph,
    DeutschJozsa,
    Qft,
    QftEntangled,
}

impl Generator {
    pub const ALL: [Generator; 6] = [
        Generator::Ghz,
        Generator::WState,
        Generator::Graph,
        Generator::DeutschJozsa,
        Generator::Qft,
        Generator::QftEntangled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::Ghz => "ghz",
            Generator::WState => "wstate",
            Generator::Graph => "graph",
            Generator::DeutschJozsa => "dj",
            Generator::Qft => "qft",
            Generator::QftEntangled => "qftentangled",
        }
    }

    /// Smallest supported qubit count.
    pub fn min_qubits(self) -> usize {
        match self {
            Generator::DeutschJozsa | Generator::QftEntangled => 2,
            _ => 1,
        }
    }

    pub fn build(self, n: usize) -> Result<Circuit, CircuitError> {
        match self {
            Generator::Ghz => ghz(n),
            Generator::WState => w_state(n),
            Generator::Graph => graph_state(n, &ring_edges(n)),
            Generator::DeutschJozsa => deutsch_jozsa(n),
            Generator::Qft => qft(n),
            Generator::QftEntangled => entangled_qft(n),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| CircuitError::InvalidArgument(format!("unknown generator '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn qft3_matches_reference_sequence() {
        let expected = vec![
            Gate::h(0),
            Gate::cp(FRAC_PI_2, 1, 0),
            Gate::cp(FRAC_PI_4, 2, 0),
            Gate::h(1),
            Gate::cp(FRAC_PI_2, 2, 1),
            Gate::h(2),
            Gate::swap(0, 2),
        ];
        assert_eq!(qft(3).unwrap().gates(), expected.as_slice());
    }

    #[test]
    fn gate_counts() {
        assert_eq!(ghz(5).unwrap().len(), 5);
        for n in 1..10 {
            assert_eq!(qft(n).unwrap().len(), n + n * (n - 1) / 2 + n / 2);
        }
        assert_eq!(entangled_qft(3).unwrap().len(), 3 + 7);
        assert_eq!(graph_state(4, &ring_edges(4)).unwrap().len(), 8);
        assert_eq!(deutsch_jozsa(4).unwrap().len(), 1 + 4 + 3 + 3);
        assert_eq!(w_state(4).unwrap().len(), 1 + 2 * 3);
    }

    #[test]
    fn invalid_sizes_are_rejected() {
        assert!(ghz(0).is_err());
        assert!(qft(0).is_err());
        assert!(deutsch_jozsa(1).is_err());
        assert!(entangled_qft(1).is_err());
        assert!(graph_state(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn generator_names_round_trip() {
        for g in Generator::ALL {
            assert_eq!(g.name().parse::<Generator>().unwrap(), g);
        }
        assert!("nope".parse::<Generator>().is_err());
    }

    #[test]
    fn random_circuits_are_deterministic() {
        assert_eq!(random_circuit(5, 30, 3), random_circuit(5, 30, 3));
        assert_ne!(random_circuit(5, 30, 3), random_circuit(5, 30, 4));
        assert_eq!(random_circuit(1, 10, 0).len(), 10);
    }
}
