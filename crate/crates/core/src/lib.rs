//! Decision-diagram quantum circuit simulation with pluggable simulation paths.
//!
//! The crate is split into five layers:
//!
//! - [`dd`]: the decision-diagram kernel (unique table, compute tables,
//!   normalization, addition, multiplication, amplitude extraction).
//! - [`circuit`]: the circuit IR, an OpenQASM 2.0 subset reader/writer,
//!   benchmark generators and a small rule-based transpiler.
//! - [`simpath`]: simulation paths (orders of pairwise multiplications),
//!   their validation, path strategies and the task-graph executor.
//! - [`tn`]: the tensor-network bridge (export, greedy planner, plan import).
//! - [`oracle`]: a dense state-vector reference simulator.
//!
//! Qubit `q[0]` is the least-significant bit of a basis-state index.
//! Bitstrings are always written most-significant qubit first, so for three
//! qubits `"100"` means `q[2] = 1`.

pub mod circuit;
pub mod dd;
pub mod oracle;
pub mod simpath;
pub mod tn;

pub use num_complex::Complex64;
