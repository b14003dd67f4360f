//! Tensor-network view of a circuit, for handing off to contraction planners
//! and importing their plans back as simulation paths.
//!
//! Tensor ids match simulation-path indices: the state is tensor `0`, gate
//! `k` is tensor `k`, and the `k`-th contraction produces id `|T| + k`.
//! Index labels are `q{qubit}_{segment}`, where the segment counts the gates
//! already applied to that qubit.
//!
//! A worked example for the three-qubit QFT (`qft(3)`):
//!
//! ```text
//! {"qubits":3,
//!  "tensors":[
//!   {"id":0,"indices":["q2_0","q1_0","q0_0"],"shape":[2,2,2],"tag":"state"},
//!   {"id":1,"indices":["q0_1","q0_0"],"shape":[2,2],"tag":1},
//!   {"id":2,"indices":["q1_1","q0_2","q1_0","q0_1"],"shape":[2,2,2,2],"tag":2},
//!   {"id":3,"indices":["q2_1","q0_3","q2_0","q0_2"],"shape":[2,2,2,2],"tag":3},
//!   {"id":4,"indices":["q1_2","q1_1"],"shape":[2,2],"tag":4},
//!   {"id":5,"indices":["q2_2","q1_3","q2_1","q1_2"],"shape":[2,2,2,2],"tag":5},
//!   {"id":6,"indices":["q2_3","q2_2"],"shape":[2,2],"tag":6},
//!   {"id":7,"indices":["q0_4","q2_4","q0_3","q2_3"],"shape":[2,2,2,2],"tag":7}],
//!  "output_indices":["q2_4","q1_3","q0_4"]}
//! ```
//!
//! and the plan `{"pairs":[[0,1],[2,8],[3,9],[4,10],[5,11],[6,12],[7,13]]}`
//! imports as the gate-by-gate path.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;
use crate::simpath::{validate, PathError, SimulationPath, ValidatedPath};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TnError {
    #[error("planning error: {0}")]
    Planning(String),
    #[error("contraction step {step}: {source}")]
    Import {
        step: usize,
        #[source]
        source: PathError,
    },
    #[error("plan import failed: {0}")]
    Path(#[from] PathError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorTag {
    State,
    /// 1-based gate position.
    Gate(usize),
}

impl Serialize for TensorTag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TensorTag::State => s.serialize_str("state"),
            TensorTag::Gate(k) => s.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for TensorTag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) if s == "state" => Ok(TensorTag::State),
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(|k| TensorTag::Gate(k as usize))
                .ok_or_else(|| de::Error::custom("gate tag must be a non-negative integer")),
            other => Err(de::Error::custom(format!("bad tensor tag {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tensor {
    pub id: usize,
    pub indices: Vec<String>,
    pub shape: Vec<usize>,
    pub tag: TensorTag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorNetworkDescription {
    pub qubits: usize,
    pub tensors: Vec<Tensor>,
    pub output_indices: Vec<String>,
}

impl TensorNetworkDescription {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, TnError> {
        serde_json::from_str(s).map_err(|e| TnError::Planning(format!("bad network JSON: {e}")))
    }
}

/// One rank-`n` state tensor plus one tensor per gate (outputs first, then
/// inputs, in the gate's qubit order). Qubits are listed most significant
/// first in the state tensor and the output indices.
pub fn export_tensor_network(c: &Circuit) -> TensorNetworkDescription {
    let n = c.qubits();
    let label = |q: usize, seg: usize| format!("q{q}_{seg}");
    let mut segment = vec![0usize; n];
    let mut tensors = Vec::with_capacity(c.len() + 1);
    tensors.push(Tensor {
        id: 0,
        indices: (0..n).rev().map(|q| label(q, 0)).collect(),
        shape: vec![2; n],
        tag: TensorTag::State,
    });
    for (i, g) in c.gates().iter().enumerate() {
        let qs: Vec<usize> = g.qubits().collect();
        let inputs: Vec<String> = qs.iter().map(|&q| label(q, segment[q])).collect();
        qs.iter().for_each(|&q| segment[q] += 1);
        let mut indices: Vec<String> = qs.iter().map(|&q| label(q, segment[q])).collect();
        indices.extend(inputs);
        tensors.push(Tensor {
            id: i + 1,
            shape: vec![2; indices.len()],
            indices,
            tag: TensorTag::Gate(i + 1),
        });
    }
    TensorNetworkDescription {
        qubits: n,
        tensors,
        output_indices: (0..n).rev().map(|q| label(q, segment[q])).collect(),
    }
}

/// An ordered list of pairwise contractions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionPlan {
    pub pairs: Vec<(usize, usize)>,
}

impl ContractionPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plan serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, TnError> {
        serde_json::from_str(s).map_err(|e| TnError::Planning(format!("bad plan JSON: {e}")))
    }
}

/// Live tensors as sets of index ids, with the dimension of every index.
struct Work {
    live: BTreeMap<usize, BTreeSet<usize>>,
    dims: Vec<usize>,
    next: usize,
}

impl Work {
    fn new(tn: &TensorNetworkDescription) -> Result<Self, TnError> {
        let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
        let mut dims: Vec<usize> = Vec::new();
        let mut live = BTreeMap::new();
        for t in &tn.tensors {
            if t.indices.len() != t.shape.len() {
                return Err(TnError::Planning(format!("tensor {}: shape does not match indices", t.id)));
            }
            let mut set = BTreeSet::new();
            for (label, &dim) in t.indices.iter().zip(&t.shape) {
                let next = ids.len();
                let id = *ids.entry(label).or_insert(next);
                if id == dims.len() {
                    dims.push(dim);
                } else if dims[id] != dim {
                    return Err(TnError::Planning(format!("index {label} has inconsistent dimensions")));
                }
                set.insert(id);
            }
            if live.insert(t.id, set).is_some() {
                return Err(TnError::Planning(format!("duplicate tensor id {}", t.id)));
            }
        }
        let next = live.keys().next_back().map_or(0, |&m| m + 1);
        Ok(Work { live, dims, next })
    }

    fn size(&self, set: &BTreeSet<usize>) -> f64 {
        set.iter().map(|&i| self.dims[i] as f64).product()
    }

    /// Indices of the contraction result: shared indices are summed away.
    fn result(&self, a: usize, b: usize) -> BTreeSet<usize> {
        self.live[&a].symmetric_difference(&self.live[&b]).copied().collect()
    }

    fn contract(&mut self, step: usize, a: usize, b: usize) -> Result<StepCost, TnError> {
        if a == b || !self.live.contains_key(&a) || !self.live.contains_key(&b) {
            return Err(TnError::Planning(format!(
                "step {step}: ({a},{b}) does not name two live tensors"
            )));
        }
        let union: BTreeSet<usize> = self.live[&a].union(&self.live[&b]).copied().collect();
        let result = self.result(a, b);
        let cost = StepCost {
            flops: self.size(&union),
            size: self.size(&result),
        };
        self.live.remove(&a);
        self.live.remove(&b);
        self.live.insert(self.next, result);
        self.next += 1;
        Ok(cost)
    }
}

struct StepCost {
    flops: f64,
    size: f64,
}

/// Greedy planner: contract the connected pair with the smallest result,
/// breaking ties by smaller combined input size, then by the lowest id pair.
pub fn greedy_plan(tn: &TensorNetworkDescription) -> Result<ContractionPlan, TnError> {
    let mut w = Work::new(tn)?;
    let mut pairs = Vec::new();
    while w.live.len() > 1 {
        let ids: Vec<usize> = w.live.keys().copied().collect();
        let mut best: Option<(f64, f64, usize, usize)> = None;
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                if w.live[&a].is_disjoint(&w.live[&b]) {
                    continue;
                }
                let key = (
                    w.size(&w.result(a, b)),
                    w.size(&w.live[&a]) + w.size(&w.live[&b]),
                    a,
                    b,
                );
                if best.is_none_or(|k| key < k) {
                    best = Some(key);
                }
            }
        }
        let (_, _, a, b) = best.ok_or_else(|| {
            TnError::Planning(format!("network is disconnected ({} components left)", w.live.len()))
        })?;
        w.contract(pairs.len(), a, b)?;
        pairs.push((a, b));
    }
    Ok(ContractionPlan { pairs })
}

/// Reinterprets a plan over exported ids as a simulation path of `c` and
/// validates it.
pub fn import_path(plan: &ContractionPlan, c: &Circuit) -> Result<ValidatedPath, TnError> {
    let path = SimulationPath::new(c.len(), plan.pairs.clone());
    validate(&path, c).map_err(|e| match e.task() {
        Some(step) => TnError::Import { step, source: e },
        None => TnError::Path(e),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanCost {
    /// Sum over steps of the product of all distinct index dimensions involved.
    pub flops: f64,
    /// Largest tensor alive at any point, counting the inputs.
    pub max_size: f64,
}

pub fn plan_cost(tn: &TensorNetworkDescription, plan: &ContractionPlan) -> Result<PlanCost, TnError> {
    let mut w = Work::new(tn)?;
    if w.live.is_empty() {
        return Err(TnError::Planning("empty network".into()));
    }
    let mut cost = PlanCost {
        flops: 0.0,
        max_size: w.live.values().map(|s| w.size(s)).fold(0.0, f64::max),
    };
    for (step, &(a, b)) in plan.pairs.iter().enumerate() {
        let s = w.contract(step, a, b)?;
        cost.flops += s.flops;
        cost.max_size = cost.max_size.max(s.size);
    }
    if w.live.len() != 1 {
        return Err(TnError::Planning(format!(
            "plan leaves {} tensors uncontracted",
            w.live.len()
        )));
    }
    Ok(cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{ghz, graph_state, qft, ring_edges, Gate};
    use crate::dd::Kernel;
    use crate::simpath::{execute, ExecOptions, PathError};

    #[test]
    fn qft3_network() {
        let tn = export_tensor_network(&qft(3).unwrap());
        assert_eq!(tn.tensors.len(), 8);
        assert_eq!(tn.tensors[0].shape, vec![2, 2, 2]);
        assert_eq!(tn.tensors[0].tag, TensorTag::State);
        assert_eq!(tn.output_indices.len(), 3);
        let mut uses: BTreeMap<&str, usize> = BTreeMap::new();
        for t in &tn.tensors {
            for i in &t.indices {
                *uses.entry(i).or_default() += 1;
            }
        }
        for (label, count) in uses {
            let open = tn.output_indices.iter().any(|o| o == label);
            assert_eq!(count, if open { 1 } else { 2 }, "{label}");
        }
        let json = serde_json::to_value(&tn).unwrap();
        assert_eq!(json["tensors"][0]["tag"], "state");
        assert_eq!(json["tensors"][3]["tag"], 3);
        assert_eq!(TensorNetworkDescription::from_json(&tn.to_json()).unwrap(), tn);
    }

    #[test]
    fn small_networks() {
        let tn = export_tensor_network(&ghz(2).unwrap());
        let ranks: Vec<usize> = tn.tensors.iter().map(|t| t.indices.len()).collect();
        assert_eq!(ranks, vec![2, 2, 4]);
        let empty = export_tensor_network(&Circuit::new(4));
        assert_eq!(empty.tensors.len(), 1);
        assert_eq!(empty.output_indices, empty.tensors[0].indices);
    }

    #[test]
    fn greedy_on_small_cases() {
        let one = Circuit::from_gates(1, vec![Gate::h(0)]).unwrap();
        let plan = greedy_plan(&export_tensor_network(&one)).unwrap();
        assert_eq!(plan.pairs, vec![(0, 1)]);
        let c = qft(3).unwrap();
        let plan = greedy_plan(&export_tensor_network(&c)).unwrap();
        assert_eq!(plan.pairs.len(), 7);
        let path = import_path(&plan, &c).unwrap();
        let mut k = Kernel::default();
        let run = |k: &mut Kernel, p: &ValidatedPath| {
            let phi = k.zero_state(3).unwrap();
            execute(k, &c, phi, p, &ExecOptions::default(), |_, _| {}).unwrap().state
        };
        let greedy = run(&mut k, &path);
        let seq = run(&mut k, &import_path(&ContractionPlan { pairs: SimulationPath::sequential(7).unwrap().tasks }, &c).unwrap());
        assert_eq!(greedy, seq);
    }

    #[test]
    fn disconnected_network_fails() {
        let mut tn = export_tensor_network(&Circuit::new(1));
        tn.tensors.push(Tensor {
            id: 1,
            indices: vec!["x".into()],
            shape: vec![2],
            tag: TensorTag::Gate(1),
        });
        assert!(matches!(greedy_plan(&tn), Err(TnError::Planning(_))));
    }

    #[test]
    fn import_errors_name_the_step() {
        let c = qft(3).unwrap();
        let plan = ContractionPlan {
            pairs: vec![(0, 1), (2, 8), (5, 9), (3, 10), (4, 11), (6, 12), (7, 13)],
        };
        match import_path(&plan, &c) {
            Err(TnError::Import { step: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        // Gates 1 and 3 cannot pair up: gate 2 shares qubit 0 with gate 3.
        let skip = ContractionPlan {
            pairs: vec![(1, 3), (2, 8), (0, 9), (4, 10), (5, 11), (6, 12), (7, 13)],
        };
        match import_path(&skip, &c) {
            Err(TnError::Import { step: 0, source }) => {
                assert!(matches!(source, PathError::NonAdjacent { blocker: 2, .. }))
            }
            other => panic!("{other:?}"),
        }
        // Overtaking a gate on other qubits is fine.
        let overtake = ContractionPlan {
            pairs: vec![(0, 1), (2, 8), (4, 9), (3, 10), (5, 11), (6, 12), (7, 13)],
        };
        import_path(&overtake, &c).unwrap();
        let short = ContractionPlan { pairs: vec![(0, 1)] };
        assert!(matches!(import_path(&short, &c), Err(TnError::Path(_))));
    }

    #[test]
    fn bypass_plan_on_graph_state() {
        // H q0, H q1, H q2, H q3, CZ(0,1), …: gates 1 and 3 act on disjoint
        // qubits and only gate 2 (q1) sits between them.
        let c = graph_state(4, &ring_edges(4)).unwrap();
        let g = c.len();
        let mut pairs = vec![(1, 3), (2, g + 1), (0, g + 2)];
        let mut last = g + 3;
        for k in 4..=g {
            pairs.push((last, k));
            last += 1;
        }
        let plan = ContractionPlan { pairs };
        let path = import_path(&plan, &c).unwrap();
        let mut k = Kernel::default();
        let phi = k.zero_state(4).unwrap();
        let a = execute(&mut k, &c, phi, &path, &ExecOptions::default(), |_, _| {}).unwrap();
        let seq = crate::simpath::validate(&SimulationPath::sequential(g).unwrap(), &c).unwrap();
        let b = execute(&mut k, &c, phi, &seq, &ExecOptions::default(), |_, _| {}).unwrap();
        assert_eq!(a.state, b.state);
    }

    #[test]
    fn costs() {
        let tn = TensorNetworkDescription {
            qubits: 0,
            tensors: vec![
                Tensor { id: 0, indices: vec!["i".into(), "j".into()], shape: vec![2, 2], tag: TensorTag::State },
                Tensor { id: 1, indices: vec!["j".into(), "k".into()], shape: vec![2, 2], tag: TensorTag::Gate(1) },
            ],
            output_indices: vec!["i".into(), "k".into()],
        };
        let c = plan_cost(&tn, &ContractionPlan { pairs: vec![(0, 1)] }).unwrap();
        assert_eq!((c.flops, c.max_size), (8.0, 4.0));

        let single = export_tensor_network(&Circuit::new(2));
        let c = plan_cost(&single, &ContractionPlan { pairs: vec![] }).unwrap();
        assert_eq!(c.flops, 0.0);
        assert!(plan_cost(&tn, &ContractionPlan { pairs: vec![] }).is_err());
        assert!(plan_cost(&tn, &ContractionPlan { pairs: vec![(0, 0)] }).is_err());
        assert!(plan_cost(&tn, &ContractionPlan { pairs: vec![(0, 5)] }).is_err());
    }

    #[test]
    fn greedy_cost_on_qft() {
        for n in 2..=10 {
            let c = qft(n).unwrap();
            let tn = export_tensor_network(&c);
            let greedy = plan_cost(&tn, &greedy_plan(&tn).unwrap()).unwrap();
            let seq = ContractionPlan { pairs: SimulationPath::sequential(c.len()).unwrap().tasks };
            let seq = plan_cost(&tn, &seq).unwrap();
            let full = (1u64 << n) as f64;
            assert!(seq.max_size >= full && greedy.max_size >= full);
            // Smallest-result-first clusters gates early; past five qubits
            // those clusters outgrow the state and the plan gets costlier.
            if n <= 5 {
                assert!(greedy.flops <= seq.flops, "n={n}: {} > {}", greedy.flops, seq.flops);
            }
        }
    }

    #[test]
    fn plan_json() {
        let p = ContractionPlan { pairs: vec![(0, 1), (2, 8)] };
        assert_eq!(p.to_json(), r#"{"pairs":[[0,1],[2,8]]}"#);
        assert_eq!(ContractionPlan::from_json(&p.to_json()).unwrap(), p);
        assert!(ContractionPlan::from_json("[1,2]").is_err());
    }
}
