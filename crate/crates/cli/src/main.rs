mod bench;
mod error;
mod report;
mod source;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ddpath::circuit::Circuit;
use ddpath::dd::{Kernel, KernelConfig};
use ddpath::simpath::{
    execute, validate, verify, Execution, ExecOptions, InitialState, SimulationPath, Strategy, Verdict,
};
use ddpath::tn::{export_tensor_network, greedy_plan};

use crate::error::{CliError, EXIT_INCONSISTENT, EXIT_OK};
use crate::report::{Amplitude, CircuitInfo, RunReport};

/// Decision-diagram circuit simulation with explicit simulation paths.
///
/// Circuit sources are a QASM file, a generator spec `name:n`
/// (ghz, wstate, graph, dj, qft, qftentangled) or `transpile(<source>)`.
/// Kernel compute tables hold 2^DDPATH_TABLE_BITS entries (default 16).
#[derive(Parser)]
#[command(name = "ddpath", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a circuit and print a JSON report.
    Simulate {
        source: String,
        /// `sequential` or `file:<path>` (path JSON or contraction plan JSON).
        #[arg(long, default_value = "sequential")]
        path: String,
        /// Comma-separated bitstrings, most significant qubit first.
        #[arg(long, value_delimiter = ',')]
        amplitudes: Vec<String>,
        /// Also write the run statistics JSON here.
        #[arg(long)]
        stats_out: Option<PathBuf>,
        /// `zero`, `ghz` or `bits:<b>`.
        #[arg(long, default_value = "zero")]
        initial: String,
    },
    /// Check two circuits for equivalence up to global phase.
    Verify {
        g: String,
        g_prime: String,
        /// `sequential`, `alternating`, `heuristic` or `plan:<file>`.
        #[arg(long, default_value = "heuristic")]
        strategy: String,
        /// `zero`, `ghz`, `bits:<b>` or `basis:K`.
        #[arg(long, default_value = "zero")]
        initial: String,
        #[arg(long)]
        stats_out: Option<PathBuf>,
    },
    /// Write the tensor-network description of a circuit.
    ExportTn {
        source: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a greedy contraction plan for a circuit's tensor network.
    Plan {
        source: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run benchmark sweeps and write CSV.
    ///
    /// Suites are `family:lo..hi[:strategy|{a,b}]` or `family:n`, where the
    /// family is a generator name, `<name>-verify` or `<name>-transpile`.
    Bench {
        #[arg(required = true)]
        suites: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Initial state; defaults to `zero` for simulation and `ghz` for verification.
        #[arg(long)]
        initial: Option<String>,
    },
    /// Simulate sequentially from |0…0⟩ and write the final state as Graphviz dot.
    Dot {
        source: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.code
        }
    };
    ExitCode::from(code as u8)
}

fn run(command: Command) -> Result<i32, CliError> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match command {
        Command::Simulate {
            source,
            path,
            amplitudes,
            stats_out,
            initial,
        } => {
            let c = source::load_circuit(&source)?;
            let strategy_name = path.clone();
            let path = match path.as_str() {
                "sequential" => sequential(&c)?,
                other => match other.strip_prefix("file:") {
                    Some(f) => source::load_path(f, c.len())?,
                    None => return Err(CliError::input("path", format!("unknown path '{other}'"))),
                },
            };
            let path = validate(&path, &c)?;
            let n = c.qubits();
            let init = match InitialState::parse_list(&initial, n)?.as_slice() {
                [one] => one.clone(),
                _ => return Err(CliError::input("initial", "simulate takes a single initial state")),
            };
            let mut kernel = Kernel::new(KernelConfig::from_env()?);
            let phi = init.build(&mut kernel, n)?;
            let run = execute(&mut kernel, &c, phi, &path, &ExecOptions::default(), |_, _| {})?;
            let amplitudes = amplitudes
                .iter()
                .map(|bits| {
                    if bits.len() != n {
                        return Err(CliError::input("amplitudes", format!("'{bits}' is not a {n}-bit string")));
                    }
                    let a = kernel.amplitude(run.state, bits).map_err(|e| CliError::input("amplitudes", e.to_string()))?;
                    Ok(Amplitude {
                        bits: bits.clone(),
                        re: a.re,
                        im: a.im,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            write_stats(stats_out, &run.stats)?;
            print_report(&RunReport {
                command: argv,
                circuit: CircuitInfo {
                    source,
                    qubits: n,
                    gates: c.len(),
                },
                strategy: strategy_name,
                stats: run.stats,
                verdict: None,
                fidelity: None,
                runs: None,
                amplitudes,
            })?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            g,
            g_prime,
            strategy,
            initial,
            stats_out,
        } => {
            let gc = source::load_circuit(&g)?;
            let gpc = source::load_circuit(&g_prime)?;
            let combined_len = gc.len() + gpc.len();
            let strat = match strategy.strip_prefix("plan:") {
                Some(f) => Strategy::Plan(source::load_path(f, combined_len)?),
                None => strategy.parse()?,
            };
            let initials = InitialState::parse_list(&initial, gc.qubits())?;
            let mut kernel = Kernel::new(KernelConfig::from_env()?);
            let v = verify(&mut kernel, &gc, &gpc, &strat, &initials, &ExecOptions::default())?;
            let stats = v
                .runs
                .iter()
                .max_by_key(|r| r.stats.peak_nodes)
                .map(|r| r.stats.clone())
                .expect("verify returns at least one run");
            write_stats(stats_out, &stats)?;
            print_report(&RunReport {
                command: argv,
                circuit: CircuitInfo {
                    source: format!("{g} vs {g_prime}"),
                    qubits: gc.qubits(),
                    gates: v.gate_count,
                },
                strategy: v.strategy.clone(),
                stats,
                verdict: Some(v.verdict),
                fidelity: Some(v.fidelity),
                runs: Some(v.runs),
                amplitudes: vec![],
            })?;
            Ok(match v.verdict {
                Verdict::Consistent => EXIT_OK,
                Verdict::Inconsistent => EXIT_INCONSISTENT,
            })
        }
        Command::ExportTn { source, out } => {
            let c = source::load_circuit(&source)?;
            emit(out, &export_tensor_network(&c).to_json())?;
            Ok(EXIT_OK)
        }
        Command::Plan { source, out } => {
            let c = source::load_circuit(&source)?;
            let plan = greedy_plan(&export_tensor_network(&c))?;
            emit(out, &plan.to_json())?;
            Ok(EXIT_OK)
        }
        Command::Bench { suites, out, initial } => {
            let suites = suites
                .iter()
                .map(|s| s.parse::<bench::Suite>())
                .collect::<Result<Vec<_>, _>>()?;
            let mut rows = Vec::new();
            for s in &suites {
                rows.extend(bench::run_suite(s, initial.as_deref())?);
            }
            match out {
                Some(p) => {
                    let f = fs::File::create(&p).map_err(|e| CliError::io(&format!("creating '{}'", p.display()), e))?;
                    bench::write_csv(&rows, f)?;
                }
                None => bench::write_csv(&rows, io::stdout().lock())?,
            }
            Ok(EXIT_OK)
        }
        Command::Dot { source, out } => {
            let c = source::load_circuit(&source)?;
            let path = validate(&sequential(&c)?, &c)?;
            let mut kernel = Kernel::new(KernelConfig::from_env()?);
            let phi = kernel.zero_state(c.qubits())?;
            let Execution { state, .. } = execute(&mut kernel, &c, phi, &path, &ExecOptions::default(), |_, _| {})?;
            emit(out, &kernel.to_dot(state))?;
            Ok(EXIT_OK)
        }
    }
}

fn sequential(c: &Circuit) -> Result<SimulationPath, CliError> {
    if c.is_empty() {
        Ok(SimulationPath::new(0, vec![]))
    } else {
        Ok(SimulationPath::sequential(c.len())?)
    }
}

fn write_stats(out: Option<PathBuf>, stats: &ddpath::simpath::RunStats) -> Result<(), CliError> {
    if let Some(p) = out {
        let json = serde_json::to_string_pretty(stats).expect("stats serialize");
        fs::write(&p, json).map_err(|e| CliError::io(&format!("writing '{}'", p.display()), e))?;
    }
    Ok(())
}

fn print_report(r: &RunReport) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(r).expect("report serializes");
    writeln!(io::stdout().lock(), "{json}").map_err(|e| CliError::io("writing report", e))
}

fn emit(out: Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(&p, text).map_err(|e| CliError::io(&format!("writing '{}'", p.display()), e)),
        None => write!(io::stdout().lock(), "{text}").map_err(|e| CliError::io("writing output", e)),
    }
}
