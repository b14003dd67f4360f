//! Edge-weighted decision diagrams for state vectors and operator matrices.
//!
//! A [`Kernel`] owns every node it creates: the unique table that makes
//! nodes canonical, the interning table for complex edge weights, and the
//! compute tables that memoize addition, multiplication and conjugate
//! transposition. [`Edge`]s are plain handles into one kernel and are
//! meaningless to any other instance.
//!
//! Diagrams are quasi-reduced: every root-to-terminal path visits one node
//! per qubit, from level `n-1` (the most significant qubit) down to level
//! `0`. The only edges that skip levels are zero-weight stubs, which always
//! target the terminal. Each node is normalized so that its largest-magnitude
//! outgoing weight is exactly `1`, ties going to the lowest successor index.
//!
//! Matrix successors are ordered `(00, 01, 10, 11)` as `(row bit, column bit)`
//! of the node's qubit.

mod compute;
mod values;

use std::fmt::Write as _;

use num_complex::Complex64;
use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::circuit::{Gate, GateKind};
use compute::ComputeTable;
use values::ValueTable;

/// Tolerance used to identify edge weights inside the kernel tables.
pub const TOLERANCE: f64 = 1e-12;

/// Tolerance for externally visible equality checks (dense comparisons).
pub const CHECK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DdError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn invalid(msg: impl Into<String>) -> DdError {
    DdError::InvalidArgument(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub const TERMINAL: NodeId = NodeId(u32::MAX);

    pub fn is_terminal(self) -> bool {
        self == NodeId::TERMINAL
    }
}

/// Handle of an interned complex weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(u32);

impl Weight {
    pub const ZERO: Weight = Weight(0);
    pub const ONE: Weight = Weight(1);
}

/// Weighted reference to a node (or to the terminal).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    node: NodeId,
    weight: Weight,
}

impl Edge {
    /// The zero stub.
    pub const ZERO: Edge = Edge {
        node: NodeId::TERMINAL,
        weight: Weight::ZERO,
    };
    /// The scalar `1`.
    pub const ONE: Edge = Edge {
        node: NodeId::TERMINAL,
        weight: Weight::ONE,
    };

    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn is_zero(&self) -> bool {
        self.weight == Weight::ZERO
    }

    pub fn is_terminal(&self) -> bool {
        self.node.is_terminal()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DdKind {
    Vector,
    Matrix,
}

impl DdKind {
    fn arity(self) -> usize {
        match self {
            DdKind::Vector => 2,
            DdKind::Matrix => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    level: u32,
    kind: DdKind,
    children: [Edge; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelConfig {
    /// log2 of the number of slots in each compute table.
    pub table_bits: u32,
    /// Memoize operations; disabling is only useful for soundness checks.
    pub compute_tables: bool,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            table_bits: 16,
            compute_tables: true,
        }
    }
}

impl KernelConfig {
    /// Default configuration, with `table_bits` taken from `DDPATH_TABLE_BITS` if set.
    pub fn from_env() -> Result<Self, DdError> {
        let mut cfg = KernelConfig::default();
        if let Ok(raw) = std::env::var("DDPATH_TABLE_BITS") {
            let bits: u32 = raw
                .trim()
                .parse()
                .map_err(|_| invalid(format!("DDPATH_TABLE_BITS must be an integer, got '{raw}'")))?;
            if !(4..=28).contains(&bits) {
                return Err(invalid(format!("DDPATH_TABLE_BITS must be in 4..=28, got {bits}")));
            }
            cfg.table_bits = bits;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KernelStats {
    pub live_nodes: usize,
    pub interned_weights: usize,
    pub compute_lookups: u64,
    pub compute_hits: u64,
}

/// A decision-diagram package instance. Single-writer: operations take `&mut self`.
#[derive(Debug)]
pub struct Kernel {
    nodes: Vec<Node>,
    free: Vec<u32>,
    unique: FxHashMap<Node, NodeId>,
    values: ValueTable,
    add_table: ComputeTable<(Edge, Edge), Edge>,
    mul_table: ComputeTable<(NodeId, NodeId), Edge>,
    ct_table: ComputeTable<NodeId, Edge>,
    pins: FxHashMap<NodeId, u32>,
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::new(KernelConfig::default())
    }
}

impl Kernel {
    pub fn new(config: KernelConfig) -> Self {
        let bits = config.table_bits;
        let on = config.compute_tables;
        Kernel {
            nodes: Vec::new(),
            free: Vec::new(),
            unique: FxHashMap::default(),
            values: ValueTable::new(),
            add_table: ComputeTable::new(bits, on),
            mul_table: ComputeTable::new(bits, on),
            ct_table: ComputeTable::new(bits.saturating_sub(2).max(4), on),
            pins: FxHashMap::default(),
        }
    }

    // ---- inspection -------------------------------------------------------

    pub fn value(&self, w: Weight) -> Complex64 {
        self.values.get(w)
    }

    /// The root weight of `e` as a complex number.
    pub fn edge_weight(&self, e: Edge) -> Complex64 {
        self.values.get(e.weight)
    }

    /// Vector or matrix, `None` for terminal (scalar) edges.
    pub fn kind(&self, e: Edge) -> Option<DdKind> {
        (!e.node.is_terminal()).then(|| self.node(e.node).kind)
    }

    /// Number of qubits spanned by `e`; `0` for terminal edges.
    pub fn qubits(&self, e: Edge) -> usize {
        if e.node.is_terminal() {
            0
        } else {
            self.node(e.node).level as usize + 1
        }
    }

    /// The outgoing edges of the node `e` points to (2 for vectors, 4 for matrices).
    pub fn successors(&self, e: Edge) -> &[Edge] {
        if e.node.is_terminal() {
            return &[];
        }
        let n = self.node(e.node);
        &n.children[..n.kind.arity()]
    }

    pub fn live_nodes(&self) -> usize {
        self.unique.len()
    }

    pub fn stats(&self) -> KernelStats {
        KernelStats {
            live_nodes: self.unique.len(),
            interned_weights: self.values.len(),
            compute_lookups: self.add_table.lookups + self.mul_table.lookups + self.ct_table.lookups,
            compute_hits: self.add_table.hits + self.mul_table.hits + self.ct_table.hits,
        }
    }

    #[inline]
    fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    /// Number of distinct non-terminal nodes reachable from `e`.
    pub fn node_count(&self, e: Edge) -> usize {
        let mut seen = FxHashSet::default();
        let mut stack = vec![e];
        while let Some(e) = stack.pop() {
            if e.is_zero() || e.node.is_terminal() || !seen.insert(e.node) {
                continue;
            }
            let n = self.node(e.node);
            stack.extend_from_slice(&n.children[..n.kind.arity()]);
        }
        seen.len()
    }

    // ---- construction -----------------------------------------------------

    pub fn terminal(&mut self, value: Complex64) -> Edge {
        let w = self.values.intern(value);
        if w == Weight::ZERO {
            Edge::ZERO
        } else {
            Edge {
                node: NodeId::TERMINAL,
                weight: w,
            }
        }
    }

    fn make_node(&mut self, level: u32, kind: DdKind, mut children: [Edge; 4]) -> Edge {
        let arity = kind.arity();
        let mut best: Option<usize> = None;
        let mut best_mag = 0.0;
        for (i, c) in children.iter_mut().enumerate() {
            if i >= arity || c.weight == Weight::ZERO {
                *c = Edge::ZERO;
                continue;
            }
            let mag = self.values.get(c.weight).norm();
            if best.is_none() || mag > best_mag + TOLERANCE {
                best = Some(i);
                best_mag = mag;
            }
        }
        let Some(b) = best else {
            return Edge::ZERO;
        };
        let top_w = children[b].weight;
        if top_w != Weight::ONE {
            let top = self.values.get(top_w);
            for (i, c) in children.iter_mut().enumerate().take(arity) {
                if i == b {
                    c.weight = Weight::ONE;
                } else if c.weight != Weight::ZERO {
                    let w = self.values.intern(self.values.get(c.weight) / top);
                    *c = if w == Weight::ZERO {
                        Edge::ZERO
                    } else {
                        Edge { node: c.node, weight: w }
                    };
                }
            }
        }
        let node = Node {
            level,
            kind,
            children,
        };
        let id = match self.unique.get(&node) {
            Some(&id) => id,
            None => {
                let id = match self.free.pop() {
                    Some(slot) => {
                        self.nodes[slot as usize] = node;
                        NodeId(slot)
                    }
                    None => {
                        assert!(self.nodes.len() < u32::MAX as usize, "node arena exhausted");
                        self.nodes.push(node);
                        NodeId(self.nodes.len() as u32 - 1)
                    }
                };
                self.unique.insert(node, id);
                id
            }
        };
        Edge {
            node: id,
            weight: top_w,
        }
    }

    /// `|0…0⟩` on `n` qubits; exactly `n` nodes.
    pub fn zero_state(&mut self, n: usize) -> Result<Edge, DdError> {
        if n == 0 {
            return Err(invalid("qubit count must be at least 1"));
        }
        let mut e = Edge::ONE;
        for level in 0..n as u32 {
            e = self.make_node(level, DdKind::Vector, [e, Edge::ZERO, Edge::ZERO, Edge::ZERO]);
        }
        Ok(e)
    }

    /// Computational basis state given most-significant qubit first.
    pub fn basis_state(&mut self, bits: &str) -> Result<Edge, DdError> {
        let bits = parse_bits(bits)?;
        if bits.is_empty() {
            return Err(invalid("qubit count must be at least 1"));
        }
        let mut e = Edge::ONE;
        for (level, &bit) in bits.iter().rev().enumerate() {
            let mut ch = [Edge::ZERO; 4];
            ch[bit as usize] = e;
            e = self.make_node(level as u32, DdKind::Vector, ch);
        }
        Ok(e)
    }

    fn identity_levels(&mut self, levels: u32) -> Edge {
        let mut e = Edge::ONE;
        for level in 0..levels {
            e = self.make_node(level, DdKind::Matrix, [e, Edge::ZERO, Edge::ZERO, e]);
        }
        e
    }

    /// The `2^n × 2^n` identity; exactly `n` nodes.
    pub fn identity(&mut self, n: usize) -> Result<Edge, DdError> {
        if n == 0 {
            return Err(invalid("qubit count must be at least 1"));
        }
        Ok(self.identity_levels(n as u32))
    }

    /// Matrix DD of `gate` extended to `n` qubits.
    pub fn gate(&mut self, gate: &Gate, n: usize) -> Result<Edge, DdError> {
        if n == 0 {
            return Err(invalid("qubit count must be at least 1"));
        }
        gate.validate(n).map_err(|e| invalid(e.to_string()))?;
        match gate.kind.matrix() {
            Some(u) => Ok(self.controlled_single(u, &gate.controls, gate.targets[0], n)),
            None => {
                debug_assert_eq!(gate.kind, GateKind::Swap);
                let (a, b) = (gate.targets[0], gate.targets[1]);
                let x = GateKind::X.matrix().expect("X is single-qubit");
                let mut ab_ctrl = gate.controls.clone();
                ab_ctrl.push(a);
                let mut ba_ctrl = gate.controls.clone();
                ba_ctrl.push(b);
                let ab = self.controlled_single(x, &ab_ctrl, b, n);
                let ba = self.controlled_single(x, &ba_ctrl, a, n);
                let half = self.mul_rec(ab, ba);
                Ok(self.mul_rec(half, ab))
            }
        }
    }

    fn controlled_single(
        &mut self,
        u: [Complex64; 4],
        controls: &[usize],
        target: usize,
        n: usize,
    ) -> Edge {
        let mut is_control = vec![false; n];
        for &c in controls {
            is_control[c] = true;
        }
        let mut em = [Edge::ZERO; 4];
        for (slot, value) in em.iter_mut().zip(u) {
            *slot = self.terminal(value);
        }
        let z4 = Edge::ZERO;
        for z in 0..target as u32 {
            for (i, slot) in em.iter_mut().enumerate() {
                *slot = if is_control[z as usize] {
                    let pass = if i == 0 || i == 3 {
                        self.identity_levels(z)
                    } else {
                        Edge::ZERO
                    };
                    self.make_node(z, DdKind::Matrix, [pass, z4, z4, *slot])
                } else {
                    self.make_node(z, DdKind::Matrix, [*slot, z4, z4, *slot])
                };
            }
        }
        let mut e = self.make_node(target as u32, DdKind::Matrix, em);
        for z in target as u32 + 1..n as u32 {
            e = if is_control[z as usize] {
                let id = self.identity_levels(z);
                self.make_node(z, DdKind::Matrix, [id, z4, z4, e])
            } else {
                self.make_node(z, DdKind::Matrix, [e, z4, z4, e])
            };
        }
        e
    }

    /// Builds a vector DD from `2^n` dense amplitudes (index bit `k` = qubit `k`).
    pub fn from_dense_vector(&mut self, amps: &[Complex64]) -> Result<Edge, DdError> {
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(invalid(format!(
                "amplitude count must be a power of two ≥ 2, got {}",
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(invalid("non-finite amplitude"));
        }
        Ok(self.build_vector(amps))
    }

    fn build_vector(&mut self, amps: &[Complex64]) -> Edge {
        if amps.len() == 1 {
            return self.terminal(amps[0]);
        }
        let half = amps.len() / 2;
        let level = half.trailing_zeros();
        let lo = self.build_vector(&amps[..half]);
        let hi = self.build_vector(&amps[half..]);
        self.make_node(level, DdKind::Vector, [lo, hi, Edge::ZERO, Edge::ZERO])
    }

    /// Builds a matrix DD from a row-major `2^n × 2^n` dense matrix.
    pub fn from_dense_matrix(&mut self, entries: &[Complex64]) -> Result<Edge, DdError> {
        let dim = (entries.len() as f64).sqrt() as usize;
        if dim < 2 || dim * dim != entries.len() || !dim.is_power_of_two() {
            return Err(invalid("matrix must be 2^n × 2^n with n ≥ 1"));
        }
        Ok(self.build_matrix(entries, dim, 0, 0, dim))
    }

    fn build_matrix(&mut self, m: &[Complex64], dim: usize, row: usize, col: usize, size: usize) -> Edge {
        if size == 1 {
            return self.terminal(m[row * dim + col]);
        }
        let half = size / 2;
        let level = half.trailing_zeros();
        let mut ch = [Edge::ZERO; 4];
        for (i, slot) in ch.iter_mut().enumerate() {
            let (r, c) = (i / 2, i % 2);
            *slot = self.build_matrix(m, dim, row + r * half, col + c * half, half);
        }
        self.make_node(level, DdKind::Matrix, ch)
    }

    // ---- weight arithmetic ------------------------------------------------

    #[inline]
    fn mul_w(&mut self, a: Weight, b: Weight) -> Weight {
        if a == Weight::ZERO || b == Weight::ZERO {
            Weight::ZERO
        } else if a == Weight::ONE {
            b
        } else if b == Weight::ONE {
            a
        } else {
            let v = self.values.get(a) * self.values.get(b);
            self.values.intern(v)
        }
    }

    #[inline]
    fn scale(&mut self, e: Edge, w: Weight) -> Edge {
        let w = self.mul_w(e.weight, w);
        if w == Weight::ZERO {
            Edge::ZERO
        } else {
            Edge { node: e.node, weight: w }
        }
    }

    // ---- operations -------------------------------------------------------

    fn check_same_shape(&self, a: Edge, b: Edge, op: &str) -> Result<(), DdError> {
        if a.is_zero() || b.is_zero() {
            return Ok(());
        }
        if self.kind(a) != self.kind(b) {
            return Err(invalid(format!(
                "{op}: kind mismatch ({:?} vs {:?})",
                self.kind(a),
                self.kind(b)
            )));
        }
        if self.qubits(a) != self.qubits(b) {
            return Err(invalid(format!(
                "{op}: level mismatch ({} vs {} qubits)",
                self.qubits(a),
                self.qubits(b)
            )));
        }
        Ok(())
    }

    /// Element-wise sum of two vectors or two matrices.
    pub fn add(&mut self, a: Edge, b: Edge) -> Result<Edge, DdError> {
        self.check_same_shape(a, b, "add")?;
        Ok(self.add_rec(a, b))
    }

    fn add_rec(&mut self, a: Edge, b: Edge) -> Edge {
        if a.weight == Weight::ZERO {
            return b;
        }
        if b.weight == Weight::ZERO {
            return a;
        }
        if a.node == b.node {
            let v = self.values.get(a.weight) + self.values.get(b.weight);
            let w = self.values.intern(v);
            return if w == Weight::ZERO {
                Edge::ZERO
            } else {
                Edge { node: a.node, weight: w }
            };
        }
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(r) = self.add_table.get(&key) {
            return r;
        }
        let na = *self.node(a.node);
        let nb = *self.node(b.node);
        let mut ch = [Edge::ZERO; 4];
        for (i, slot) in ch.iter_mut().enumerate().take(na.kind.arity()) {
            let x = self.scale(na.children[i], a.weight);
            let y = self.scale(nb.children[i], b.weight);
            *slot = self.add_rec(x, y);
        }
        let r = self.make_node(na.level, na.kind, ch);
        self.add_table.insert(key, r);
        r
    }

    fn check_product(&self, m: Edge, x: Edge, want: Option<DdKind>, op: &str) -> Result<(), DdError> {
        if m.is_zero() || x.is_zero() {
            return Ok(());
        }
        let (km, kx) = (self.kind(m), self.kind(x));
        if km.is_none() && kx.is_none() {
            return Ok(());
        }
        if km != Some(DdKind::Matrix) {
            return Err(invalid(format!("{op}: left operand must be a matrix, got {km:?}")));
        }
        if let Some(want) = want {
            if kx != Some(want) {
                return Err(invalid(format!("{op}: right operand must be a {want:?}, got {kx:?}")));
            }
        } else if kx.is_none() {
            return Err(invalid(format!("{op}: right operand is a scalar")));
        }
        if self.qubits(m) != self.qubits(x) {
            return Err(invalid(format!(
                "{op}: level mismatch ({} vs {} qubits)",
                self.qubits(m),
                self.qubits(x)
            )));
        }
        Ok(())
    }

    /// Matrix-vector product `m · v`.
    pub fn multiply_mv(&mut self, m: Edge, v: Edge) -> Result<Edge, DdError> {
        self.check_product(m, v, Some(DdKind::Vector), "multiply_mv")?;
        Ok(self.mul_rec(m, v))
    }

    /// Matrix-matrix product `a · b`.
    pub fn multiply_mm(&mut self, a: Edge, b: Edge) -> Result<Edge, DdError> {
        self.check_product(a, b, Some(DdKind::Matrix), "multiply_mm")?;
        Ok(self.mul_rec(a, b))
    }

    /// `a · b` where `b` may be a vector or a matrix.
    pub fn multiply(&mut self, a: Edge, b: Edge) -> Result<Edge, DdError> {
        self.check_product(a, b, None, "multiply")?;
        Ok(self.mul_rec(a, b))
    }

    fn mul_rec(&mut self, a: Edge, b: Edge) -> Edge {
        if a.weight == Weight::ZERO || b.weight == Weight::ZERO {
            return Edge::ZERO;
        }
        let w = self.mul_w(a.weight, b.weight);
        if a.node.is_terminal() {
            return Edge {
                node: NodeId::TERMINAL,
                weight: w,
            };
        }
        let key = (a.node, b.node);
        let r = match self.mul_table.get(&key) {
            Some(r) => r,
            None => {
                let na = *self.node(a.node);
                let nb = *self.node(b.node);
                let mut ch = [Edge::ZERO; 4];
                match nb.kind {
                    DdKind::Vector => {
                        for (i, slot) in ch.iter_mut().enumerate().take(2) {
                            let x = self.mul_rec(na.children[2 * i], nb.children[0]);
                            let y = self.mul_rec(na.children[2 * i + 1], nb.children[1]);
                            *slot = self.add_rec(x, y);
                        }
                    }
                    DdKind::Matrix => {
                        for (k, slot) in ch.iter_mut().enumerate() {
                            let (i, j) = (k / 2, k % 2);
                            let x = self.mul_rec(na.children[2 * i], nb.children[j]);
                            let y = self.mul_rec(na.children[2 * i + 1], nb.children[2 + j]);
                            *slot = self.add_rec(x, y);
                        }
                    }
                }
                let r = self.make_node(na.level, nb.kind, ch);
                self.mul_table.insert(key, r);
                r
            }
        };
        self.scale(r, w)
    }

    /// Conjugate transpose `m†` of a matrix DD.
    pub fn conjugate_transpose(&mut self, m: Edge) -> Result<Edge, DdError> {
        if self.kind(m) == Some(DdKind::Vector) {
            return Err(invalid("conjugate_transpose expects a matrix"));
        }
        Ok(self.ct_rec(m))
    }

    fn ct_rec(&mut self, e: Edge) -> Edge {
        if e.is_zero() {
            return Edge::ZERO;
        }
        let w = self.values.intern(self.values.get(e.weight).conj());
        if e.node.is_terminal() {
            return Edge {
                node: NodeId::TERMINAL,
                weight: w,
            };
        }
        let r = match self.ct_table.get(&e.node) {
            Some(r) => r,
            None => {
                let n = *self.node(e.node);
                let ch = [
                    self.ct_rec(n.children[0]),
                    self.ct_rec(n.children[2]),
                    self.ct_rec(n.children[1]),
                    self.ct_rec(n.children[3]),
                ];
                let r = self.make_node(n.level, DdKind::Matrix, ch);
                self.ct_table.insert(e.node, r);
                r
            }
        };
        self.scale(r, w)
    }

    /// `⟨a|b⟩`.
    pub fn inner_product(&self, a: Edge, b: Edge) -> Result<Complex64, DdError> {
        self.check_same_shape(a, b, "inner_product")?;
        if self.kind(a) == Some(DdKind::Matrix) {
            return Err(invalid("inner_product expects vectors"));
        }
        let mut memo = FxHashMap::default();
        Ok(self.ip_rec(a, b, &mut memo))
    }

    fn ip_rec(&self, a: Edge, b: Edge, memo: &mut FxHashMap<(NodeId, NodeId), Complex64>) -> Complex64 {
        if a.is_zero() || b.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let w = self.values.get(a.weight).conj() * self.values.get(b.weight);
        if a.node.is_terminal() {
            return w;
        }
        if let Some(&s) = memo.get(&(a.node, b.node)) {
            return w * s;
        }
        let (na, nb) = (*self.node(a.node), *self.node(b.node));
        let s = self.ip_rec(na.children[0], nb.children[0], memo)
            + self.ip_rec(na.children[1], nb.children[1], memo);
        memo.insert((a.node, b.node), s);
        w * s
    }

    /// Amplitude of `basis` (most-significant qubit first): the product of
    /// the weights along the selected root-to-terminal path.
    pub fn amplitude(&self, v: Edge, basis: &str) -> Result<Complex64, DdError> {
        let bits = parse_bits(basis)?;
        if v.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if self.kind(v) == Some(DdKind::Matrix) {
            return Err(invalid("amplitude expects a vector"));
        }
        let n = self.qubits(v);
        if bits.len() != n {
            return Err(invalid(format!(
                "basis string has {} bit(s), state has {n} qubit(s)",
                bits.len()
            )));
        }
        let mut acc = self.values.get(v.weight);
        let mut e = v;
        while !e.node.is_terminal() {
            let node = self.node(e.node);
            let bit = bits[n - 1 - node.level as usize];
            e = node.children[bit as usize];
            if e.is_zero() {
                return Ok(Complex64::new(0.0, 0.0));
            }
            acc *= self.values.get(e.weight);
        }
        Ok(acc)
    }

    /// Dense `2^n` amplitudes of a vector DD over `n` qubits.
    pub fn to_dense_vector(&self, v: Edge, n: usize) -> Result<Vec<Complex64>, DdError> {
        if !v.is_zero() && (self.kind(v) == Some(DdKind::Matrix) || self.qubits(v) != n) {
            return Err(invalid(format!("expected an {n}-qubit vector")));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); 1 << n];
        self.fill_vector(v, Complex64::new(1.0, 0.0), 0, &mut out);
        Ok(out)
    }

    fn fill_vector(&self, e: Edge, acc: Complex64, base: usize, out: &mut [Complex64]) {
        if e.is_zero() {
            return;
        }
        let acc = acc * self.values.get(e.weight);
        if e.node.is_terminal() {
            out[base] += acc;
            return;
        }
        let n = self.node(e.node);
        self.fill_vector(n.children[0], acc, base, out);
        self.fill_vector(n.children[1], acc, base | 1 << n.level, out);
    }

    /// Dense row-major `2^n × 2^n` entries of a matrix DD over `n` qubits.
    pub fn to_dense_matrix(&self, m: Edge, n: usize) -> Result<Vec<Complex64>, DdError> {
        if !m.is_zero() && (self.kind(m) == Some(DdKind::Vector) || self.qubits(m) != n) {
            return Err(invalid(format!("expected an {n}-qubit matrix")));
        }
        let dim = 1usize << n;
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        self.fill_matrix(m, Complex64::new(1.0, 0.0), 0, 0, dim, &mut out);
        Ok(out)
    }

    fn fill_matrix(&self, e: Edge, acc: Complex64, row: usize, col: usize, dim: usize, out: &mut [Complex64]) {
        if e.is_zero() {
            return;
        }
        let acc = acc * self.values.get(e.weight);
        if e.node.is_terminal() {
            out[row * dim + col] += acc;
            return;
        }
        let n = self.node(e.node);
        for (i, &c) in n.children.iter().enumerate() {
            let (r, cc) = (i / 2, i % 2);
            self.fill_matrix(c, acc, row | r << n.level, col | cc << n.level, dim, out);
        }
    }

    // ---- memory -----------------------------------------------------------

    /// Marks `e` as an external root for [`Kernel::collect`].
    pub fn inc_ref(&mut self, e: Edge) {
        if !e.node.is_terminal() {
            *self.pins.entry(e.node).or_insert(0) += 1;
        }
    }

    pub fn dec_ref(&mut self, e: Edge) {
        if e.node.is_terminal() {
            return;
        }
        if let Some(count) = self.pins.get_mut(&e.node) {
            *count -= 1;
            if *count == 0 {
                self.pins.remove(&e.node);
            }
        }
    }

    /// Garbage-collects with the pinned edges as the only roots.
    pub fn collect(&mut self) -> usize {
        self.gc(&[])
    }

    /// Removes every node unreachable from `roots` or from a pinned edge.
    ///
    /// Compute tables are cleared, since their entries may mention reclaimed
    /// nodes. Returns the number of reclaimed nodes.
    pub fn gc(&mut self, roots: &[Edge]) -> usize {
        let mut marked = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = roots.iter().map(|e| e.node).collect();
        stack.extend(self.pins.keys().copied());
        while let Some(id) = stack.pop() {
            if id.is_terminal() || std::mem::replace(&mut marked[id.0 as usize], true) {
                continue;
            }
            let n = &self.nodes[id.0 as usize];
            stack.extend(n.children[..n.kind.arity()].iter().map(|c| c.node));
        }
        let before = self.unique.len();
        let free = &mut self.free;
        self.unique.retain(|_, id| {
            let keep = marked[id.0 as usize];
            if !keep {
                free.push(id.0);
            }
            keep
        });
        self.add_table.clear();
        self.mul_table.clear();
        self.ct_table.clear();
        before - self.unique.len()
    }

    // ---- export -----------------------------------------------------------

    /// Graphviz rendering: nodes labelled by level, edges by weight, zero
    /// stubs as filled dots.
    pub fn to_dot(&self, root: Edge) -> String {
        let fmt_w = |w: Complex64| {
            if w.im.abs() < 1e-12 {
                format!("{:.4}", w.re)
            } else {
                format!("{:.4}{:+.4}i", w.re, w.im)
            }
        };
        let mut out = String::from("digraph dd {\n  node [shape=circle];\n  root [shape=point];\n  t [shape=box,label=\"1\"];\n");
        let name = |id: NodeId| {
            if id.is_terminal() {
                "t".to_string()
            } else {
                format!("n{}", id.0)
            }
        };
        let _ = writeln!(out, "  root -> {} [label=\"{}\"];", name(root.node), fmt_w(self.edge_weight(root)));
        let mut seen = FxHashSet::default();
        let mut stack = vec![root.node];
        let mut stub = 0usize;
        while let Some(id) = stack.pop() {
            if id.is_terminal() || !seen.insert(id) {
                continue;
            }
            let n = self.node(id);
            let _ = writeln!(out, "  {} [label=\"q{}\"];", name(id), n.level);
            for (i, c) in n.children[..n.kind.arity()].iter().enumerate() {
                if c.is_zero() {
                    let _ = writeln!(
                        out,
                        "  z{stub} [shape=point,style=filled];\n  {} -> z{stub} [taillabel=\"{i}\"];",
                        name(id)
                    );
                    stub += 1;
                } else {
                    let _ = writeln!(
                        out,
                        "  {} -> {} [taillabel=\"{i}\",label=\"{}\"];",
                        name(id),
                        name(c.node),
                        fmt_w(self.edge_weight(*c))
                    );
                    stack.push(c.node);
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Parses a most-significant-first bitstring.
pub fn parse_bits(s: &str) -> Result<Vec<bool>, DdError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(invalid(format!("invalid character '{other}' in basis string"))),
        })
        .collect()
}
