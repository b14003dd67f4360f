use std::io::Write;
use std::str::FromStr;

use ddpath::circuit::{transpile, GateSet, Generator};
use ddpath::dd::{Kernel, KernelConfig};
use ddpath::simpath::{
    execute, validate, verify, ExecOptions, InitialState, SimulationPath, Strategy,
};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Plain simulation from `|0…0⟩`.
    Simulate(Generator),
    /// `G` against itself.
    Verify(Generator),
    /// `G` against its transpiled form.
    Transpile(Generator),
}

impl Family {
    fn generator(self) -> Generator {
        match self {
            Family::Simulate(g) | Family::Verify(g) | Family::Transpile(g) => g,
        }
    }

    fn name(self) -> String {
        match self {
            Family::Simulate(g) => g.name().to_string(),
            Family::Verify(g) => format!("{}-verify", g.name()),
            Family::Transpile(g) => format!("{}-transpile", g.name()),
        }
    }
}

impl FromStr for Family {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let gen = |name: &str| {
            name.parse::<Generator>()
                .map_err(|_| CliError::input("bench", format!("unknown benchmark family '{s}'")))
        };
        if let Some(base) = s.strip_suffix("-verify") {
            Ok(Family::Verify(gen(base)?))
        } else if let Some(base) = s.strip_suffix("-transpile") {
            Ok(Family::Transpile(gen(base)?))
        } else {
            Ok(Family::Simulate(gen(s)?))
        }
    }
}

/// One parsed `family:lo..hi[:strategies]` argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suite {
    pub family: Family,
    pub lo: usize,
    pub hi: usize,
    pub strategies: Vec<String>,
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |m: &str| CliError::input("bench", format!("'{s}': {m}"));
        let mut parts = s.splitn(3, ':');
        let family: Family = parts.next().unwrap_or_default().parse()?;
        let range = parts.next().ok_or_else(|| bad("missing qubit range"))?;
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad("bad qubit range"));
        let (lo, hi) = match range.split_once("..") {
            Some((a, b)) => (num(a)?, num(b)?),
            None => {
                let n = num(range)?;
                (n, n)
            }
        };
        if lo > hi {
            return Err(bad("empty qubit range"));
        }
        let strategies: Vec<String> = match parts.next() {
            None => match family {
                Family::Simulate(_) => vec!["sequential".into()],
                _ => ["sequential", "alternating", "heuristic"].map(String::from).to_vec(),
            },
            Some(list) => list
                .trim_start_matches('{')
                .trim_end_matches('}')
                .split(',')
                .map(|x| x.trim().to_string())
                .collect(),
        };
        for st in &strategies {
            Strategy::from_str(st).map_err(|e| bad(&e.to_string()))?;
            if matches!(family, Family::Simulate(_)) && st != "sequential" {
                return Err(bad("plain simulation families only support the sequential strategy"));
            }
        }
        Ok(Suite {
            family,
            lo,
            hi,
            strategies,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub benchmark: String,
    pub n: usize,
    pub gates: usize,
    pub strategy: String,
    pub peak_nodes: usize,
    pub final_nodes: usize,
    pub elapsed_ns: u64,
}

/// Runs every size and strategy of `suite`, one fresh kernel per row.
/// `initial` overrides the family default (`zero` for simulation, `ghz`
/// for verification).
pub fn run_suite(suite: &Suite, initial: Option<&str>) -> Result<Vec<BenchRow>, CliError> {
    let config = KernelConfig::from_env()?;
    let options = ExecOptions::default();
    let mut rows = Vec::new();
    let gen = suite.family.generator();
    for n in suite.lo.max(gen.min_qubits())..=suite.hi {
        let g = gen.build(n)?;
        for st in &suite.strategies {
            let strategy: Strategy = st.parse()?;
            let mut kernel = Kernel::new(config);
            let row = match suite.family {
                Family::Simulate(_) => {
                    let init = InitialState::parse_list(initial.unwrap_or("zero"), n)?;
                    let [init] = init.as_slice() else {
                        return Err(CliError::input("bench", "simulation takes a single initial state"));
                    };
                    let path = if g.is_empty() {
                        SimulationPath::new(0, vec![])
                    } else {
                        SimulationPath::sequential(g.len())?
                    };
                    let path = validate(&path, &g)?;
                    let phi = init.build(&mut kernel, n)?;
                    let run = execute(&mut kernel, &g, phi, &path, &options, |_, _| {})?;
                    BenchRow {
                        benchmark: suite.family.name(),
                        n,
                        gates: g.len(),
                        strategy: st.clone(),
                        peak_nodes: run.stats.peak_nodes,
                        final_nodes: run.stats.final_nodes,
                        elapsed_ns: run.stats.elapsed_ns,
                    }
                }
                Family::Verify(_) | Family::Transpile(_) => {
                    let gp = match suite.family {
                        Family::Transpile(_) => transpile(&g, &GateSet::default())?,
                        _ => g.clone(),
                    };
                    let init = InitialState::parse_list(initial.unwrap_or("ghz"), n)?;
                    let v = verify(&mut kernel, &g, &gp, &strategy, &init, &options)?;
                    let worst = v
                        .runs
                        .iter()
                        .max_by_key(|r| r.stats.peak_nodes)
                        .expect("verify returns at least one run");
                    BenchRow {
                        benchmark: suite.family.name(),
                        n,
                        gates: v.gate_count,
                        strategy: st.clone(),
                        peak_nodes: worst.stats.peak_nodes,
                        final_nodes: worst.stats.final_nodes,
                        elapsed_ns: v.runs.iter().map(|r| r.stats.elapsed_ns).sum(),
                    }
                }
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn write_csv(rows: &[BenchRow], out: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::input("io", e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::io("writing csv", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_syntax() {
        let s: Suite = "qft-verify:4..14:{sequential,alternating}".parse().unwrap();
        assert_eq!(s.family, Family::Verify(Generator::Qft));
        assert_eq!((s.lo, s.hi), (4, 14));
        assert_eq!(s.strategies, vec!["sequential", "alternating"]);

        let s: Suite = "ghz:5".parse().unwrap();
        assert_eq!((s.lo, s.hi), (5, 5));
        assert_eq!(s.strategies, vec!["sequential"]);

        let s: Suite = "dj-transpile:3..4".parse().unwrap();
        assert_eq!(s.strategies.len(), 3);

        assert!("ghz:4..8:alternating".parse::<Suite>().is_err());
        assert!("nope:4".parse::<Suite>().is_err());
        assert!("ghz:9..4".parse::<Suite>().is_err());
        assert!("ghz".parse::<Suite>().is_err());
    }

    #[test]
    fn ghz_rows() {
        let rows = run_suite(&"ghz:2..6".parse().unwrap(), None).unwrap();
        assert_eq!(rows.len(), 5);
        for r in rows {
            assert_eq!(r.final_nodes, 2 * r.n - 1);
        }
    }
}
