//! Rule-based lowering to a native gate set.
//!
//! No optimization pass runs after lowering, so the number of native gates a
//! kind expands to is exact and can be tabulated up front.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::{Circuit, CircuitError, Gate, GateClass, GateKind, GateTag};

/// Set of gate classes a transpiled circuit may contain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateSet(BTreeSet<GateClass>);

impl GateSet {
    pub fn new(classes: impl IntoIterator<Item = GateClass>) -> Self {
        GateSet(classes.into_iter().collect())
    }

    pub fn contains(&self, class: &GateClass) -> bool {
        self.0.contains(class)
    }

    pub fn iter(&self) -> impl Iterator<Item = &GateClass> {
        self.0.iter()
    }
}

impl Default for GateSet {
    /// `{H, P(θ), CX}`.
    fn default() -> Self {
        GateSet::new([
            GateClass::new(GateTag::H, 0),
            GateClass::new(GateTag::P, 0),
            GateClass::new(GateTag::X, 1),
        ])
    }
}

/// Native-gate count per gate class.
pub type CostTable = HashMap<GateClass, usize>;

const MAX_DEPTH: usize = 8;

fn unsupported(g: &Gate, set: &GateSet) -> CircuitError {
    let names: Vec<String> = set.iter().map(ToString::to_string).collect();
    CircuitError::UnsupportedGate(format!(
        "no rule lowers '{}' into {{{}}}",
        g.class(),
        names.join(", ")
    ))
}

/// One rewrite step; `None` if no rule exists for the gate.
///
/// Single-qubit rules hold up to a global phase (`RZ(θ) → P(θ)` and the
/// rules built on it).
fn rewrite(g: &Gate) -> Option<Vec<Gate>> {
    let s = |k: GateKind, q: usize| Gate::single(k, q);
    match (g.kind, g.controls.as_slice()) {
        (GateKind::Swap, []) => {
            let (a, b) = (g.targets[0], g.targets[1]);
            Some(vec![Gate::cx(a, b), Gate::cx(b, a), Gate::cx(a, b)])
        }
        (GateKind::P(theta), [c]) => {
            let (c, t) = (*c, g.targets[0]);
            Some(vec![
                Gate::p(theta / 2.0, c),
                Gate::cx(c, t),
                Gate::p(-theta / 2.0, t),
                Gate::cx(c, t),
                Gate::p(theta / 2.0, t),
            ])
        }
        (GateKind::Z, [c]) => Some(vec![Gate::cp(PI, *c, g.targets[0])]),
        (kind, []) => {
            let q = g.targets[0];
            let p = |theta: f64| Gate::p(theta, q);
            Some(match kind {
                GateKind::Z => vec![p(PI)],
                GateKind::S => vec![p(FRAC_PI_2)],
                GateKind::Sdg => vec![p(-FRAC_PI_2)],
                GateKind::T => vec![p(FRAC_PI_4)],
                GateKind::Tdg => vec![p(-FRAC_PI_4)],
                GateKind::RZ(theta) => vec![p(theta)],
                GateKind::X => vec![Gate::h(q), p(PI), Gate::h(q)],
                GateKind::Y => vec![s(GateKind::Sdg, q), s(GateKind::X, q), s(GateKind::S, q)],
                GateKind::SX => vec![Gate::h(q), s(GateKind::S, q), Gate::h(q)],
                GateKind::SXdg => vec![Gate::h(q), s(GateKind::Sdg, q), Gate::h(q)],
                GateKind::RY(theta) => vec![
                    s(GateKind::Sdg, q),
                    Gate::h(q),
                    s(GateKind::RZ(theta), q),
                    Gate::h(q),
                    s(GateKind::S, q),
                ],
                _ => return None,
            })
        }
        _ => None,
    }
}

fn lower_into(
    g: &Gate,
    set: &GateSet,
    depth: usize,
    out: &mut Vec<Gate>,
) -> Result<(), CircuitError> {
    if set.contains(&g.class()) {
        out.push(g.clone());
        return Ok(());
    }
    if depth == MAX_DEPTH {
        return Err(unsupported(g, set));
    }
    let parts = rewrite(g).ok_or_else(|| unsupported(g, set))?;
    for part in &parts {
        lower_into(part, set, depth + 1, out).map_err(|_| unsupported(g, set))?;
    }
    Ok(())
}

/// Lowers every gate of `c` into `set`; the result equals `c` up to global phase.
pub fn transpile(c: &Circuit, set: &GateSet) -> Result<Circuit, CircuitError> {
    let mut gates = Vec::with_capacity(c.len() * 3);
    for g in c.gates() {
        lower_into(g, set, 0, &mut gates)?;
    }
    Circuit::from_gates(c.qubits(), gates)
}

fn representative(class: GateClass) -> Gate {
    let kind = match class.tag {
        GateTag::X => GateKind::X,
        GateTag::Y => GateKind::Y,
        GateTag::Z => GateKind::Z,
        GateTag::H => GateKind::H,
        GateTag::S => GateKind::S,
        GateTag::Sdg => GateKind::Sdg,
        GateTag::T => GateKind::T,
        GateTag::Tdg => GateKind::Tdg,
        GateTag::SX => GateKind::SX,
        GateTag::SXdg => GateKind::SXdg,
        GateTag::P => GateKind::P(1.0),
        GateTag::RY => GateKind::RY(1.0),
        GateTag::RZ => GateKind::RZ(1.0),
        GateTag::U => GateKind::U(1.0, 1.0, 1.0),
        GateTag::Swap => GateKind::Swap,
    };
    let controls: Vec<usize> = (0..class.controls).collect();
    let targets: Vec<usize> = (class.controls..class.controls + kind.target_count()).collect();
    Gate::controlled(kind, controls, targets)
}

/// Number of native gates the lowering rules emit for one gate of `class`.
pub fn decomposition_cost(class: GateClass, set: &GateSet) -> Result<usize, CircuitError> {
    let mut out = Vec::new();
    lower_into(&representative(class), set, 0, &mut out)?;
    Ok(out.len())
}

/// Decomposition costs for every gate class that occurs in `c`.
pub fn cost_table(c: &Circuit, set: &GateSet) -> Result<CostTable, CircuitError> {
    let mut table = CostTable::new();
    for g in c.gates() {
        let class = g.class();
        if let std::collections::hash_map::Entry::Vacant(e) = table.entry(class) {
            e.insert(decomposition_cost(class, set)?);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{qft, random_circuit};

    #[test]
    fn qft3_lowers_to_21_gates() {
        let t = transpile(&qft(3).unwrap(), &GateSet::default()).unwrap();
        assert_eq!(t.len(), 21);
        let set = GateSet::default();
        assert!(t.gates().iter().all(|g| set.contains(&g.class())));
    }

    #[test]
    fn lowering_is_a_fixpoint() {
        let set = GateSet::default();
        let once = transpile(&qft(5).unwrap(), &set).unwrap();
        assert_eq!(transpile(&once, &set).unwrap(), once);
    }

    #[test]
    fn cp_rule_shape() {
        let c = Circuit::from_gates(2, vec![Gate::cp(0.8, 1, 0)]).unwrap();
        let t = transpile(&c, &GateSet::default()).unwrap();
        assert_eq!(
            t.gates(),
            &[
                Gate::p(0.4, 1),
                Gate::cx(1, 0),
                Gate::p(-0.4, 0),
                Gate::cx(1, 0),
                Gate::p(0.4, 0),
            ]
        );
    }

    #[test]
    fn costs() {
        let set = GateSet::default();
        let cost = |tag, controls| decomposition_cost(GateClass::new(tag, controls), &set).unwrap();
        assert_eq!(cost(GateTag::X, 1), 1);
        assert_eq!(cost(GateTag::Swap, 0), 3);
        assert_eq!(cost(GateTag::P, 1), 5);
        assert_eq!(cost(GateTag::Z, 1), 5);
        assert_eq!(cost(GateTag::H, 0), 1);
        assert_eq!(cost(GateTag::X, 0), 3);
        assert_eq!(cost(GateTag::RY, 0), 5);
    }

    #[test]
    fn missing_rules_are_unsupported() {
        let set = GateSet::default();
        for class in [
            GateClass::new(GateTag::U, 0),
            GateClass::new(GateTag::X, 2),
            GateClass::new(GateTag::RY, 1),
            GateClass::new(GateTag::Swap, 1),
        ] {
            assert!(matches!(
                decomposition_cost(class, &set),
                Err(CircuitError::UnsupportedGate(_))
            ));
        }
    }

    #[test]
    fn total_cost_equals_lowered_length() {
        let set = GateSet::default();
        for seed in 0..20 {
            let raw = random_circuit(4, 30, seed);
            let supported = raw
                .gates()
                .iter()
                .filter(|g| decomposition_cost(g.class(), &set).is_ok())
                .cloned()
                .collect();
            let c = Circuit::from_gates(4, supported).unwrap();
            let t = transpile(&c, &set).unwrap();
            let table = cost_table(&c, &set).unwrap();
            let total: usize = c.gates().iter().map(|g| table[&g.class()]).sum();
            assert_eq!(total, t.len());
        }
    }
}
