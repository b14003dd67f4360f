use crate::circuit::{Circuit, CostTable};

use super::{PathError, SimulationPath};

/// Builds a path for `G · G′⁻¹` that starts between the two halves and grows
/// the matrix product outward.
///
/// `schedule[i]` is the number of `G′⁻¹` gates taken after gate `i + 1` of
/// `G` (gates of `G` are consumed from the last one backwards). Leftover
/// gates on either side are appended once the other side runs out. The final
/// task applies the assembled matrix to the state.
pub fn outward(g: usize, g_prime: usize, schedule: &[usize]) -> Result<SimulationPath, PathError> {
    if schedule.len() != g {
        return Err(PathError::InvalidArgument(format!(
            "schedule has {} entries for {} gates",
            schedule.len(),
            g
        )));
    }
    let total = g + g_prime;
    let mut tasks = Vec::with_capacity(total);
    let mut current: Option<usize> = None;
    let mut take = |tasks: &mut Vec<(usize, usize)>, idx: usize| {
        current = Some(match current {
            None => idx,
            Some(cur) => {
                tasks.push((cur, idx));
                total + tasks.len()
            }
        });
    };
    let mut next_prime = g + 1;
    for i in (1..=g).rev() {
        take(&mut tasks, i);
        for _ in 0..schedule[i - 1] {
            if next_prime > total {
                break;
            }
            take(&mut tasks, next_prime);
            next_prime += 1;
        }
    }
    while next_prime <= total {
        take(&mut tasks, next_prime);
        next_prime += 1;
    }
    if let Some(m) = current {
        tasks.push((0, m));
    }
    Ok(SimulationPath::new(total, tasks))
}

/// Alternates single gates from `G` and `G′⁻¹`, starting in the middle.
/// With one side empty this degenerates to consuming the other side in order.
pub fn alternating(g: usize, g_prime: usize) -> Result<SimulationPath, PathError> {
    outward(g, g_prime, &vec![1; g])
}

/// Per-gate consumption counts for `g`, in `g`'s gate order.
pub fn heuristic_schedule(g: &Circuit, costs: &CostTable) -> Result<Vec<usize>, PathError> {
    g.gates()
        .iter()
        .map(|gate| {
            costs
                .get(&gate.class())
                .copied()
                .ok_or_else(|| PathError::UnsupportedGate(format!("no decomposition cost for '{}'", gate.class())))
        })
        .collect()
}

/// After each gate of `G`, take as many gates of `G′⁻¹` as that gate is
/// expected to have been compiled into.
pub fn heuristic(g: &Circuit, g_prime: &Circuit, costs: &CostTable) -> Result<SimulationPath, PathError> {
    if g.qubits() != g_prime.qubits() {
        return Err(PathError::InvalidArgument(format!(
            "qubit count mismatch: {} vs {}",
            g.qubits(),
            g_prime.qubits()
        )));
    }
    outward(g.len(), g_prime.len(), &heuristic_schedule(g, costs)?)
}
