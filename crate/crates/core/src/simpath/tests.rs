use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::circuit::{
    cost_table, entangled_qft, ghz, qft, random_circuit, transpile, Gate, GateKind, GateSet,
};
use crate::dd::{DdKind, Edge, Kernel};
use crate::oracle;

const EXAMPLE_6: [(usize, usize); 7] = [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11), (12, 13)];
const EXAMPLE_8: [(usize, usize); 7] = [(0, 1), (2, 8), (3, 9), (4, 10), (5, 11), (6, 12), (7, 13)];

fn run(k: &mut Kernel, c: &Circuit, path: &SimulationPath, init: &str) -> Execution {
    let v = validate(path, c).unwrap();
    let phi = k.basis_state(init).unwrap();
    execute(k, c, phi, &v, &ExecOptions::default(), |_, _| {}).unwrap()
}

#[test]
fn sequential_shape() {
    let p = SimulationPath::sequential(7).unwrap();
    assert_eq!(p.tasks, EXAMPLE_8.to_vec());
    assert_eq!(SimulationPath::sequential(1).unwrap().tasks, vec![(0, 1)]);
    assert!(matches!(
        SimulationPath::sequential(0),
        Err(PathError::InvalidArgument(_))
    ));
    let v = validate_structure(&SimulationPath::sequential(40).unwrap()).unwrap();
    assert!(v
        .contractions()
        .iter()
        .all(|c| c.kind == ContractionKind::MatrixVector));
}

#[test]
fn pairwise_tree_is_valid() {
    let v = validate_structure(&SimulationPath::new(7, EXAMPLE_6.to_vec())).unwrap();
    let kinds: Vec<_> = v.contractions().iter().map(|c| c.kind).collect();
    assert_eq!(kinds[0], ContractionKind::MatrixVector);
    assert_eq!(kinds[1], ContractionKind::MatrixMatrix);
    assert_eq!(v.final_index(), 14);
    assert_eq!(v.contractions()[6].span, (0, 7));
}

#[test]
fn orientation_follows_positions() {
    let v = validate_structure(&SimulationPath::new(7, EXAMPLE_8.to_vec())).unwrap();
    // (2, 8): index 8 covers positions {0, 1}, so it is applied first.
    let c = v.contractions()[1];
    assert_eq!((c.left, c.right), (2, 8));
    let v = validate_structure(&SimulationPath::new(2, vec![(2, 1), (3, 0)])).unwrap();
    assert_eq!((v.contractions()[0].left, v.contractions()[0].right), (2, 1));
    assert_eq!((v.contractions()[1].left, v.contractions()[1].right), (3, 0));
}

#[test]
fn skipping_a_dependent_gate_is_rejected() {
    let c = qft(3).unwrap();
    let p = SimulationPath::new(7, vec![(0, 2), (1, 8), (3, 9), (4, 10), (5, 11), (6, 12), (7, 13)]);
    match validate(&p, &c) {
        Err(PathError::NonAdjacent { task: 0, blocker: 1, .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn structural_errors() {
    let bad = |tasks: Vec<(usize, usize)>| validate_structure(&SimulationPath::new(3, tasks)).unwrap_err();
    assert_eq!(bad(vec![(0, 1)]), PathError::TaskCount { expected: 3, found: 1 });
    assert_eq!(
        bad(vec![(0, 1), (0, 2), (4, 3)]),
        PathError::ReusedIndex { task: 1, index: 0 }
    );
    assert_eq!(
        bad(vec![(0, 1), (5, 2), (4, 3)]),
        PathError::UnknownIndex { task: 1, index: 5 }
    );
    assert_eq!(
        bad(vec![(1, 1), (0, 2), (4, 3)]),
        PathError::ReusedIndex { task: 0, index: 1 }
    );
    assert!(matches!(
        bad(vec![(0, 1), (3, 4), (2, 5)]),
        PathError::NonAdjacent { task: 1, .. }
    ));
    assert_eq!(bad(vec![(0, 1), (3, 4), (2, 5)]).task(), Some(1));
}

#[test]
fn commuting_bypass() {
    let c = Circuit::from_gates(2, vec![Gate::h(0), Gate::h(1), Gate::x(0)]).unwrap();
    let ok = SimulationPath::new(3, vec![(1, 3), (2, 4), (0, 5)]);
    let v = validate(&ok, &c).unwrap();
    assert_eq!(v.contractions()[0].span, (1, 3));
    // Strict adjacency rejects the same plan.
    assert!(validate_structure(&ok).is_err());
    // The state itself needs no commutation, only the gates applied to it.
    let early = SimulationPath::new(3, vec![(1, 3), (0, 4), (2, 5)]);
    validate(&early, &c).unwrap();
    let bad = SimulationPath::new(3, vec![(0, 3), (1, 4), (2, 5)]);
    assert!(matches!(
        validate(&bad, &c),
        Err(PathError::NonAdjacent { task: 0, blocker: 1, .. })
    ));
    let mut k = Kernel::default();
    let a = run(&mut k, &c, &ok, "00");
    let b = run(&mut k, &c, &SimulationPath::sequential(3).unwrap(), "00");
    let e = run(&mut k, &c, &early, "00");
    assert_eq!(a.state, b.state);
    assert_eq!(e.state, b.state);
}

#[test]
fn reordering_requires_disjoint_supports() {
    // Merge {2} with {1,3} where gate 2 shares a qubit with gate 3.
    let c = Circuit::from_gates(2, vec![Gate::h(0), Gate::h(1), Gate::cx(1, 0)]).unwrap();
    let p = SimulationPath::new(3, vec![(1, 3), (2, 4), (0, 5)]);
    assert!(matches!(
        validate(&p, &c),
        Err(PathError::NonAdjacent { task: 0, .. })
    ));
}

#[test]
fn path_json_round_trip() {
    let p = SimulationPath::new(7, EXAMPLE_8.to_vec());
    let json = p.to_json();
    assert_eq!(json, r#"{"gate_count":7,"path":[[0,1],[2,8],[3,9],[4,10],[5,11],[6,12],[7,13]]}"#);
    assert_eq!(SimulationPath::from_json(&json).unwrap(), p);
    assert!(SimulationPath::from_json("{\"path\": 3}").is_err());
}

#[test]
fn alternating_shape() {
    let p = alternating(7, 7).unwrap();
    assert_eq!(p.gate_count, 14);
    assert_eq!(p.tasks[0], (7, 8));
    assert_eq!(p.tasks[1], (15, 6));
    assert_eq!(p.tasks[2], (16, 9));
    assert_eq!(*p.tasks.last().unwrap(), (0, 27));
    let v = validate_structure(&p).unwrap();
    let kinds: Vec<_> = v.contractions().iter().map(|c| c.kind).collect();
    assert!(kinds[..13].iter().all(|&k| k == ContractionKind::MatrixMatrix));
    assert_eq!(kinds[13], ContractionKind::MatrixVector);
    assert_eq!(alternating(0, 3).unwrap().tasks, vec![(1, 2), (4, 3), (0, 5)]);
    assert_eq!(alternating(1, 0).unwrap().tasks, vec![(0, 1)]);
    assert!(alternating(0, 0).unwrap().tasks.is_empty());
    // Clamping on either side.
    validate_structure(&alternating(2, 6).unwrap()).unwrap();
    validate_structure(&alternating(6, 2).unwrap()).unwrap();
    validate_structure(&alternating(1, 1).unwrap()).unwrap();
}

#[test]
fn heuristic_schedule_for_lowered_qft() {
    let g = qft(3).unwrap();
    let gp = transpile(&g, &GateSet::default()).unwrap();
    let costs = cost_table(&g, &GateSet::default()).unwrap();
    assert_eq!(heuristic_schedule(&g, &costs).unwrap(), vec![1, 5, 5, 1, 5, 1, 3]);
    let p = heuristic(&g, &gp, &costs).unwrap();
    assert_eq!(p.gate_count, 7 + 21);
    validate_structure(&p).unwrap();

    let mut empty = costs.clone();
    empty.remove(&Gate::swap(0, 1).class());
    assert!(matches!(
        heuristic(&g, &gp, &empty),
        Err(PathError::UnsupportedGate(_))
    ));
}

#[test]
fn unit_costs_reduce_to_alternating() {
    let g = qft(4).unwrap();
    let ones = cost_table(&g, &GateSet::new(g.gates().iter().map(|x| x.class()))).unwrap();
    assert!(ones.values().all(|&c| c == 1));
    assert_eq!(heuristic(&g, &g, &ones).unwrap(), alternating(g.len(), g.len()).unwrap());
}

#[test]
fn task_graph_orders() {
    let v = validate_structure(&SimulationPath::new(7, EXAMPLE_6.to_vec())).unwrap();
    let tg = TaskGraph::new(&v);
    assert_eq!(tg.leaves(), vec![0, 1, 2, 3]);
    assert_eq!(tg.dependencies(4), &[0, 1]);
    assert_eq!(tg.dependents(4), &[6]);
    assert_eq!(tg.topological_order(), (0..7).collect::<Vec<_>>());
    let seq = validate_structure(&SimulationPath::sequential(5).unwrap()).unwrap();
    assert_eq!(TaskGraph::new(&seq).leaves(), vec![0]);
}

#[test]
fn execution_node_counts() {
    let mut k = Kernel::default();
    let g = ghz(3).unwrap();
    let r = run(&mut k, &g, &SimulationPath::sequential(g.len()).unwrap(), "000");
    assert_eq!(r.stats.final_nodes, 5);
    assert_eq!(r.stats.task_count, g.len());
    assert!(r.stats.peak_nodes >= r.stats.final_nodes);
    let e = entangled_qft(3).unwrap();
    let r = run(&mut k, &e, &SimulationPath::sequential(e.len()).unwrap(), "000");
    assert_eq!(r.stats.final_nodes, 7);
}

#[test]
fn printed_paths_agree_on_qft3() {
    let mut k = Kernel::default();
    let c = qft(3).unwrap();
    let a = run(&mut k, &c, &SimulationPath::sequential(7).unwrap(), "000");
    let b = run(&mut k, &c, &SimulationPath::new(7, EXAMPLE_8.to_vec()), "000");
    let t = run(&mut k, &c, &SimulationPath::new(7, EXAMPLE_6.to_vec()), "000");
    assert_eq!(a.state, b.state);
    assert_eq!(a.state, t.state);
    let amp = 1.0 / 8f64.sqrt();
    for i in 0..8 {
        let x = k.amplitude(a.state, &format!("{i:03b}")).unwrap();
        assert!((x.re - amp).abs() < 1e-12 && x.im.abs() < 1e-12);
    }
}

#[test]
fn alternating_intermediates_are_identity() {
    let mut k = Kernel::default();
    let g = qft(3).unwrap();
    let combined = g.concat_inverse(&g).unwrap();
    let id = k.identity(3).unwrap();
    k.inc_ref(id);
    let v = validate(&alternating(7, 7).unwrap(), &combined).unwrap();
    let phi = k.zero_state(3).unwrap();
    let mut seen = 0;
    let r = execute(&mut k, &combined, phi, &v, &ExecOptions::default(), |kern, ev| {
        if ev.kind == ContractionKind::MatrixMatrix {
            assert_eq!(kern.kind(ev.result), Some(DdKind::Matrix));
            let (lo, hi) = ev.span;
            if 7 - lo + 1 == hi - 7 {
                assert_eq!(ev.result, id, "task {}", ev.task_index);
                assert_eq!(ev.result_nodes, 3);
                seen += 1;
            }
        }
    })
    .unwrap();
    assert_eq!(seen, 7);
    assert_eq!(r.state, k.zero_state(3).unwrap());
}

#[test]
fn gc_during_execution_keeps_results() {
    let mut k = Kernel::default();
    let c = random_circuit(6, 80, 3);
    let opts = ExecOptions { gc_threshold: 16 };
    let v = validate(&SimulationPath::sequential(c.len()).unwrap(), &c).unwrap();
    let phi = k.zero_state(6).unwrap();
    let r = execute(&mut k, &c, phi, &v, &opts, |_, _| {}).unwrap();
    let want = oracle::simulate(&c, "000000").unwrap();
    let got = k.to_dense_vector(r.state, 6).unwrap();
    for (x, y) in got.iter().zip(want.amplitudes()) {
        assert!((x - y).norm() < 1e-10);
    }
    k.collect();
    assert_eq!(k.live_nodes(), k.node_count(r.state));
}

#[test]
fn execute_rejects_mismatches() {
    let mut k = Kernel::default();
    let c = ghz(3).unwrap();
    let v = validate(&SimulationPath::sequential(3).unwrap(), &c).unwrap();
    let wrong = k.zero_state(2).unwrap();
    assert!(execute(&mut k, &c, wrong, &v, &ExecOptions::default(), |_, _| {}).is_err());
    let m = k.identity(3).unwrap();
    assert!(execute(&mut k, &c, m, &v, &ExecOptions::default(), |_, _| {}).is_err());
    let other = ghz(4).unwrap();
    assert!(validate(&SimulationPath::sequential(3).unwrap(), &other).is_err());
}

#[test]
fn empty_circuit_returns_initial_state() {
    let mut k = Kernel::default();
    let c = Circuit::new(2);
    let v = validate(&SimulationPath::new(0, vec![]), &c).unwrap();
    let phi = k.basis_state("10").unwrap();
    let r = execute(&mut k, &c, phi, &v, &ExecOptions::default(), |_, _| {}).unwrap();
    assert_eq!(r.state, phi);
    assert_eq!(r.stats.task_count, 0);
}

#[test]
fn run_stats_json_fields() {
    let mut k = Kernel::default();
    let c = ghz(2).unwrap();
    let r = run(&mut k, &c, &SimulationPath::sequential(2).unwrap(), "00");
    let v: serde_json::Value = serde_json::to_value(&r.stats).unwrap();
    for key in ["tasks", "peak_nodes", "final_nodes", "task_count", "elapsed_ns"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["tasks"][0]["task_index"], 0);
    assert!(v["tasks"][1]["result_nodes"].is_u64());
    let back: RunStats = serde_json::from_value(v).unwrap();
    assert_eq!(back, r.stats);
}

#[test]
fn initial_state_specs() {
    assert_eq!(InitialState::parse_list("zero", 3).unwrap(), vec![InitialState::Zero]);
    assert_eq!(InitialState::parse_list("ghz", 3).unwrap(), vec![InitialState::Ghz]);
    let b = InitialState::parse_list("basis:6", 3).unwrap();
    let bits: Vec<String> = b.iter().map(ToString::to_string).collect();
    assert_eq!(&bits[..4], &["bits:000", "bits:111", "bits:010", "bits:101"]);
    assert_eq!(bits.len(), 6);
    assert_eq!(InitialState::parse_list("basis:100", 2).unwrap().len(), 4);
    assert_eq!(
        InitialState::parse_list("bits:011", 3).unwrap(),
        vec![InitialState::Bits("011".into())]
    );
    for bad in ["bits:01", "bits:0a1", "basis:0", "basis:x", "plus"] {
        assert!(InitialState::parse_list(bad, 3).is_err(), "{bad}");
    }
    let mut k = Kernel::default();
    let g = InitialState::Ghz.build(&mut k, 4).unwrap();
    assert_eq!(k.node_count(g), 7);
}

#[test]
fn verification_verdicts() {
    let mut k = Kernel::default();
    let g = qft(4).unwrap();
    let gp = transpile(&g, &GateSet::default()).unwrap();
    let init = InitialState::parse_list("basis:4", 4).unwrap();
    for s in [Strategy::Sequential, Strategy::Alternating, Strategy::Heuristic] {
        let v = verify(&mut k, &g, &gp, &s, &init, &ExecOptions::default()).unwrap();
        assert_eq!(v.verdict, Verdict::Consistent, "{}", s.name());
        assert!(v.fidelity >= FIDELITY_THRESHOLD);
        assert_eq!(v.runs.len(), 4);
    }
    let x = Circuit::from_gates(1, vec![Gate::x(0)]).unwrap();
    let v = verify(&mut k, &x, &Circuit::new(1), &Strategy::Sequential, &[InitialState::Zero], &ExecOptions::default())
        .unwrap();
    assert_eq!(v.verdict, Verdict::Inconsistent);
    assert!(v.fidelity < 1e-12);
    // Global phase is ignored: Z·P(π)⁻¹ = I, X·(H P(π) H)⁻¹ = I.
    let z = Circuit::from_gates(1, vec![Gate::single(GateKind::RZ(1.0), 0)]).unwrap();
    let p = Circuit::from_gates(1, vec![Gate::p(1.0, 0)]).unwrap();
    let v = verify(&mut k, &z, &p, &Strategy::Sequential, &[InitialState::Ghz], &ExecOptions::default()).unwrap();
    assert_eq!(v.verdict, Verdict::Consistent);
    let m = verify(&mut k, &x, &x, &Strategy::Plan(SimulationPath::new(2, vec![(1, 2), (0, 3)])), &[InitialState::Zero], &ExecOptions::default()).unwrap();
    assert_eq!(m.verdict, Verdict::Consistent);
    let a = verify(&mut k, &x, &Circuit::new(1), &Strategy::Alternating, &[InitialState::Zero], &ExecOptions::default())
        .unwrap();
    assert_eq!(a.verdict, Verdict::Inconsistent);
    assert!(verify(&mut k, &x, &Circuit::new(2), &Strategy::Sequential, &[InitialState::Zero], &ExecOptions::default()).is_err());
}

#[test]
fn strategy_names_parse() {
    for s in ["sequential", "alternating", "heuristic"] {
        assert_eq!(s.parse::<Strategy>().unwrap().name(), s);
    }
    assert!("plan".parse::<Strategy>().is_err());
}

/// A random valid tree: repeatedly merge two neighbouring operands.
fn random_tree(gates: usize, seed: u64) -> SimulationPath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut live: Vec<usize> = (0..=gates).collect();
    let mut tasks = Vec::new();
    while live.len() > 1 {
        let i = rng.gen_range(0..live.len() - 1);
        let (a, b) = (live[i], live[i + 1]);
        let pair = if rng.gen() { (a, b) } else { (b, a) };
        tasks.push(pair);
        live.splice(i..=i + 1, [gates + tasks.len()]);
    }
    SimulationPath::new(gates, tasks)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn final_state_is_path_independent(n in 1usize..=5, count in 1usize..25, seed in any::<u64>()) {
        let mut k = Kernel::default();
        let c = random_circuit(n, count, seed);
        let init = "0".repeat(n);
        let seq = run(&mut k, &c, &SimulationPath::sequential(c.len()).unwrap(), &init);
        let tree = run(&mut k, &c, &random_tree(c.len(), seed ^ 0xabc), &init);
        prop_assert_eq!(tree.stats.task_count, c.len());
        let a = k.to_dense_vector(seq.state, n).unwrap();
        let b = k.to_dense_vector(tree.state, n).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).norm() < 1e-9);
        }
        prop_assert_eq!(seq.state, tree.state);
    }

    #[test]
    fn sequential_results_are_vectors(count in 1usize..30, seed in any::<u64>()) {
        let mut k = Kernel::default();
        let c = random_circuit(3, count, seed);
        let v = validate(&SimulationPath::sequential(count).unwrap(), &c).unwrap();
        let phi = k.zero_state(3).unwrap();
        let mut all_vectors = true;
        execute(&mut k, &c, phi, &v, &ExecOptions::default(), |kern, ev| {
            all_vectors &= kern.kind(ev.result) == Some(DdKind::Vector) || ev.result == Edge::ZERO;
        }).unwrap();
        prop_assert!(all_vectors);
    }
}
