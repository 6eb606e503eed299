//! Hypergraph product of a Tanner graph with itself.
//!
//! Index layout (all row-major):
//!
//! * qubits: the `V1×V2` block `v1·n + v2`, then the `C1×C2` block
//!   `n² + c1·m + c2`;
//! * X checks `V1×C2`: `v1·m + c2`;
//! * Z generators `C1×V2`: `c1·n + v2`.
//!
//! Z errors are detected by X checks. A Z generator `(c1, v2)` acts on
//! `Γ(c1)×{v2}` (its VV part) and `{c1}×Γ(v2)` (its CC part); its local view
//! is the `Δ_C × Δ_V` grid of X checks `Γ(c1)×Γ(v2)`.

use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::IndexSet;
use crate::cdec::SparseParity;
use crate::gf2::{self, RowEchelon};
use crate::tanner::TannerGraph;

/// Largest supported `Δ_V` or `Δ_C`.
pub const MAX_LOCAL_SIDE: usize = 16;
/// Largest supported generator weight `Δ_V + Δ_C`.
pub const MAX_GENERATOR_WEIGHT: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HgpError {
    #[error("degrees ({0}, {1}) exceed the supported local view size")]
    DegreeTooLarge(usize, usize),
    #[error("qubit index {0} out of range")]
    QubitOutOfRange(usize),
    #[error("check index {0} out of range")]
    CheckOutOfRange(usize),
    #[error("residual has nonzero syndrome (weight {0})")]
    NonzeroSyndrome(usize),
}

/// Coordinates of a physical qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Qubit {
    VV(usize, usize),
    CC(usize, usize),
}

#[derive(Debug)]
pub struct HgpCode {
    graph: TannerGraph,
    n: usize,
    m: usize,
    z_basis: OnceLock<(RowEchelon, Vec<u32>)>,
    x_matrix: OnceLock<SparseParity>,
}

impl Clone for HgpCode {
    fn clone(&self) -> Self {
        Self::new(self.graph.clone()).expect("already validated")
    }
}

impl HgpCode {
    pub fn new(graph: TannerGraph) -> Result<Self, HgpError> {
        let (dv, dc) = (graph.deg_bit(), graph.deg_check());
        if dv > MAX_LOCAL_SIDE || dc > MAX_LOCAL_SIDE || dv + dc > MAX_GENERATOR_WEIGHT {
            return Err(HgpError::DegreeTooLarge(dv, dc));
        }
        let code = Self {
            n: graph.n_bits(),
            m: graph.n_checks(),
            graph,
            z_basis: OnceLock::new(),
            x_matrix: OnceLock::new(),
        };
        debug_assert!(code.check_invariants());
        Ok(code)
    }

    pub fn graph(&self) -> &TannerGraph {
        &self.graph
    }
    /// `|V|`.
    pub fn n(&self) -> usize {
        self.n
    }
    /// `|C|`.
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn deg_bit(&self) -> usize {
        self.graph.deg_bit()
    }
    pub fn deg_check(&self) -> usize {
        self.graph.deg_check()
    }
    /// `N = |V|² + |C|²`.
    pub fn n_qubits(&self) -> usize {
        self.n * self.n + self.m * self.m
    }
    /// `M_X = |V|·|C|`.
    pub fn n_checks(&self) -> usize {
        self.n * self.m
    }
    /// `M_Z = |C|·|V|`.
    pub fn n_generators(&self) -> usize {
        self.m * self.n
    }
    pub fn is_34(&self) -> bool {
        self.deg_bit() == 3 && self.deg_check() == 4
    }

    #[inline]
    pub fn vv(&self, v1: usize, v2: usize) -> usize {
        v1 * self.n + v2
    }
    #[inline]
    pub fn cc(&self, c1: usize, c2: usize) -> usize {
        self.n * self.n + c1 * self.m + c2
    }
    #[inline]
    pub fn check_index(&self, v1: usize, c2: usize) -> usize {
        v1 * self.m + c2
    }
    #[inline]
    pub fn check_coords(&self, x: usize) -> (usize, usize) {
        (x / self.m, x % self.m)
    }
    #[inline]
    pub fn generator_index(&self, c1: usize, v2: usize) -> usize {
        c1 * self.n + v2
    }
    #[inline]
    pub fn generator_coords(&self, g: usize) -> (usize, usize) {
        (g / self.n, g % self.n)
    }

    #[inline]
    pub fn qubit(&self, q: usize) -> Qubit {
        let nn = self.n * self.n;
        if q < nn {
            Qubit::VV(q / self.n, q % self.n)
        } else {
            let r = q - nn;
            Qubit::CC(r / self.m, r % self.m)
        }
    }

    /// Calls `f` on every X check adjacent to qubit `q`.
    #[inline]
    pub fn for_each_qubit_check(&self, q: usize, mut f: impl FnMut(usize)) {
        match self.qubit(q) {
            Qubit::VV(v1, v2) => {
                for &c2 in self.graph.bit_neighbors(v2) {
                    f(self.check_index(v1, c2));
                }
            }
            Qubit::CC(c1, c2) => {
                for &v1 in self.graph.check_neighbors(c1) {
                    f(self.check_index(v1, c2));
                }
            }
        }
    }

    pub fn qubit_checks(&self, q: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_qubit_check(q, |x| out.push(x));
        out
    }

    /// Qubits in the support of X check `x`: `{v1}×Γ(c2) ⊔ Γ(v1)×{c2}`.
    pub fn check_qubits(&self, x: usize) -> Vec<usize> {
        let (v1, c2) = self.check_coords(x);
        let vv = self.graph.check_neighbors(c2).iter().map(|&v2| self.vv(v1, v2));
        let cc = self.graph.bit_neighbors(v1).iter().map(|&c1| self.cc(c1, c2));
        vv.chain(cc).collect()
    }

    /// Support of Z generator `g`, VV part (local-view rows) first, then CC
    /// part (local-view columns).
    pub fn generator_support(&self, g: usize) -> Vec<usize> {
        let (c1, v2) = self.generator_coords(g);
        let rows = self.graph.check_neighbors(c1).iter().map(|&v1| self.vv(v1, v2));
        let cols = self.graph.bit_neighbors(v2).iter().map(|&c2| self.cc(c1, c2));
        rows.chain(cols).collect()
    }

    /// Row labels `Γ(c1)` and column labels `Γ(v2)` of the local view of `g`.
    #[inline]
    pub fn local_axes(&self, g: usize) -> (&[usize], &[usize]) {
        let (c1, v2) = self.generator_coords(g);
        (self.graph.check_neighbors(c1), self.graph.bit_neighbors(v2))
    }

    /// Calls `f` on every Z generator whose local view contains check `x`.
    #[inline]
    pub fn for_each_check_generator(&self, x: usize, mut f: impl FnMut(usize)) {
        let (v1, c2) = self.check_coords(x);
        for &c1 in self.graph.bit_neighbors(v1) {
            for &v2 in self.graph.check_neighbors(c2) {
                f(self.generator_index(c1, v2));
            }
        }
    }

    fn check_invariants(&self) -> bool {
        let (dv, dc) = (self.deg_bit(), self.deg_check());
        let gen_ok = (0..self.n_generators()).all(|g| self.generator_support(g).len() == dv + dc);
        let mut qubit_degree = vec![0usize; self.n_qubits()];
        for g in 0..self.n_generators() {
            for q in self.generator_support(g) {
                qubit_degree[q] += 1;
            }
        }
        for x in 0..self.n_checks() {
            for q in self.check_qubits(x) {
                qubit_degree[q] += 1;
            }
        }
        gen_ok && qubit_degree.iter().all(|&d| d <= 2 * dv.max(dc))
    }

    fn z_basis(&self) -> &(RowEchelon, Vec<u32>) {
        self.z_basis.get_or_init(|| {
            let nq = self.n_qubits();
            let rows = (0..self.n_generators())
                .map(|g| gf2::packed_from_indices(nq, self.generator_support(g)));
            let basis = RowEchelon::from_rows(nq, rows);
            let idx = basis.pivot_index();
            (basis, idx)
        })
    }

    /// Rank of the Z-stabilizer matrix.
    pub fn z_rank(&self) -> usize {
        self.z_basis().0.rank()
    }

    /// Rank of the X-check matrix.
    pub fn x_rank(&self) -> usize {
        let nq = self.n_qubits();
        gf2::rank(nq, (0..self.n_checks()).map(|x| gf2::packed_from_indices(nq, self.check_qubits(x))))
    }

    /// Number of logical qubits `K = N − rank(H_X) − rank(H_Z)`.
    pub fn logical_dimension(&self) -> usize {
        self.n_qubits() - self.x_rank() - self.z_rank()
    }

    /// `true` iff `v` lies in the Z-stabilizer row space.
    pub fn is_stabilizer(&self, v: &ErrorSupport) -> bool {
        let (basis, idx) = self.z_basis();
        basis.contains_sparse(v.0.words(), idx)
    }

    /// Same decision as [`HgpCode::is_stabilizer`] through a full sequential
    /// reduction pass; used to audit the fast path.
    pub fn is_stabilizer_full_reduction(&self, v: &ErrorSupport) -> bool {
        self.z_basis().0.contains(v.0.words())
    }

    /// Warms up the lazily built stabilizer basis.
    pub fn prepare(&self) {
        let _ = self.z_basis();
        let _ = self.x_check_matrix();
    }

    /// X-check matrix as a sparse parity-check structure (bits = qubits).
    pub fn x_check_matrix(&self) -> &SparseParity {
        self.x_matrix.get_or_init(|| {
            let rows: Vec<Vec<usize>> = (0..self.n_checks()).map(|x| self.check_qubits(x)).collect();
            SparseParity::from_check_rows(self.n_qubits(), &rows)
        })
    }

    /// One line per X check listing its qubit indices in ascending order.
    pub fn x_checks_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# X checks: {} rows over {} qubits", self.n_checks(), self.n_qubits());
        for x in 0..self.n_checks() {
            let mut qs = self.check_qubits(x);
            qs.sort_unstable();
            let line: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

/// Set of unsatisfied X checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Syndrome {
    set: IndexSet,
    row_len: usize,
}

impl Syndrome {
    pub fn zero(code: &HgpCode) -> Self {
        Self { set: IndexSet::new(code.n_checks()), row_len: code.m() }
    }

    pub fn from_checks(code: &HgpCode, checks: impl IntoIterator<Item = usize>) -> Result<Self, HgpError> {
        let mut s = Self::zero(code);
        for x in checks {
            if x >= code.n_checks() {
                return Err(HgpError::CheckOutOfRange(x));
            }
            s.set.toggle(x);
        }
        Ok(s)
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.set.len()
    }
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.set.is_empty()
    }
    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.set.contains(x)
    }
    #[inline]
    pub fn toggle(&mut self, x: usize) -> bool {
        self.set.toggle(x)
    }
    pub fn checks(&self) -> impl Iterator<Item = usize> + '_ {
        self.set.iter()
    }
    pub fn sorted_checks(&self) -> Vec<usize> {
        self.set.sorted()
    }
    /// Unsatisfied checks as `(v1, c2)` coordinates.
    pub fn points(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.set.iter().map(|x| (x / self.row_len, x % self.row_len))
    }
    pub fn xor_with(&mut self, other: &Syndrome) {
        self.set.symmetric_difference_with(&other.set);
    }
    pub fn is_consistent(&self) -> bool {
        self.set.is_consistent()
    }
    pub fn n_checks(&self) -> usize {
        self.set.universe()
    }
}

/// Support of a Z error or correction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorSupport(IndexSet);

impl ErrorSupport {
    pub fn empty(code: &HgpCode) -> Self {
        Self(IndexSet::new(code.n_qubits()))
    }

    pub fn from_qubits(code: &HgpCode, qubits: impl IntoIterator<Item = usize>) -> Result<Self, HgpError> {
        let mut e = Self::empty(code);
        for q in qubits {
            if q >= code.n_qubits() {
                return Err(HgpError::QubitOutOfRange(q));
            }
            e.0.toggle(q);
        }
        Ok(e)
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    #[inline]
    pub fn contains(&self, q: usize) -> bool {
        self.0.contains(q)
    }
    #[inline]
    pub fn toggle(&mut self, q: usize) -> bool {
        self.0.toggle(q)
    }
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter()
    }
    pub fn sorted(&self) -> Vec<usize> {
        self.0.sorted()
    }
    pub fn symmetric_difference(&self, other: &ErrorSupport) -> ErrorSupport {
        let mut out = self.clone();
        out.0.symmetric_difference_with(&other.0);
        out
    }
    pub fn symmetric_difference_with(&mut self, other: &ErrorSupport) {
        self.0.symmetric_difference_with(&other.0);
    }
}

/// `σ(E)`: checks adjacent to an odd number of qubits of `error`.
pub fn quantum_syndrome(code: &HgpCode, error: &ErrorSupport) -> Syndrome {
    let mut s = Syndrome::zero(code);
    for q in error.qubits() {
        code.for_each_qubit_check(q, |x| {
            s.toggle(x);
        });
    }
    s
}

/// Syndrome bits of the checks in one generator's local view.
///
/// Row `i` is the VV qubit `(Γ(c1)[i], v2)`, column `j` the CC qubit
/// `(c1, Γ(v2)[j])`; entry `(i, j)` is check `(Γ(c1)[i], Γ(v2)[j])`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalView {
    pub generator: usize,
    pub n_rows: usize,
    pub n_cols: usize,
    /// Bit `j` of `rows[i]` is entry `(i, j)`.
    pub rows: [u16; MAX_LOCAL_SIDE],
}

impl LocalView {
    pub fn from_rows(generator: usize, n_cols: usize, rows: &[u16]) -> Self {
        assert!(rows.len() <= MAX_LOCAL_SIDE && n_cols <= MAX_LOCAL_SIDE);
        let mut r = [0u16; MAX_LOCAL_SIDE];
        let col_mask = ((1u32 << n_cols) - 1) as u16;
        for (dst, src) in r.iter_mut().zip(rows) {
            *dst = src & col_mask;
        }
        Self { generator, n_rows: rows.len(), n_cols, rows: r }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }
    #[inline]
    pub fn row_weight(&self, i: usize) -> u32 {
        self.rows[i].count_ones()
    }
    /// Rows with a set entry in column `j`, as a bitmask.
    #[inline]
    pub fn col_mask(&self, j: usize) -> u32 {
        let mut mask = 0u32;
        for i in 0..self.n_rows {
            mask |= (((self.rows[i] >> j) & 1) as u32) << i;
        }
        mask
    }
    #[inline]
    pub fn col_weight(&self, j: usize) -> u32 {
        self.col_mask(j).count_ones()
    }
    #[inline]
    pub fn weight(&self) -> u32 {
        self.rows[..self.n_rows].iter().map(|r| r.count_ones()).sum()
    }
    pub fn is_zero(&self) -> bool {
        self.rows[..self.n_rows].iter().all(|&r| r == 0)
    }
}

pub fn local_view(code: &HgpCode, generator: usize, syndrome: &Syndrome) -> LocalView {
    let (rows, cols) = code.local_axes(generator);
    let mut view = LocalView { generator, n_rows: rows.len(), n_cols: cols.len(), rows: [0; MAX_LOCAL_SIDE] };
    for (i, &v1) in rows.iter().enumerate() {
        let base = v1 * code.m();
        let mut r = 0u16;
        for (j, &c2) in cols.iter().enumerate() {
            r |= (syndrome.contains(base + c2) as u16) << j;
        }
        view.rows[i] = r;
    }
    view
}

/// Subset of one generator's support: `rows` selects VV qubits (`F_V`),
/// `cols` selects CC qubits (`F_C`), both indexed as in [`LocalView`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlipSet {
    pub generator: usize,
    pub rows: u32,
    pub cols: u32,
}

impl FlipSet {
    pub fn empty(generator: usize) -> Self {
        Self { generator, rows: 0, cols: 0 }
    }

    #[inline]
    pub fn size(&self) -> u32 {
        self.rows.count_ones() + self.cols.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 && self.cols == 0
    }

    pub fn qubits(&self, code: &HgpCode) -> Vec<usize> {
        let (c1, v2) = code.generator_coords(self.generator);
        let (rows, cols) = code.local_axes(self.generator);
        let vv = rows.iter().enumerate().filter(|(i, _)| (self.rows >> i) & 1 == 1).map(|(_, &v1)| code.vv(v1, v2));
        let cc = cols.iter().enumerate().filter(|(j, _)| (self.cols >> j) & 1 == 1).map(|(_, &c2)| code.cc(c1, c2));
        vv.chain(cc).collect()
    }
}

/// `Λ^u(F) = F_V×F_C^c ⊔ F_V^c×F_C`: the checks hit by exactly one qubit of
/// `flip`, which are exactly the checks whose syndrome bit flipping `F`
/// toggles.
pub fn unique_neighborhood(code: &HgpCode, flip: &FlipSet) -> Vec<usize> {
    let (rows, cols) = code.local_axes(flip.generator);
    let mut out = Vec::new();
    for (i, &v1) in rows.iter().enumerate() {
        let row_in = (flip.rows >> i) & 1;
        for (j, &c2) in cols.iter().enumerate() {
            if row_in ^ ((flip.cols >> j) & 1) == 1 {
                out.push(code.check_index(v1, c2));
            }
        }
    }
    out
}

/// Decides whether a syndrome-free residual is a nontrivial logical operator.
pub fn is_logical_failure(code: &HgpCode, residual: &ErrorSupport) -> Result<bool, HgpError> {
    let s = quantum_syndrome(code, residual);
    if !s.is_zero() {
        return Err(HgpError::NonzeroSyndrome(s.weight()));
    }
    Ok(!code.is_stabilizer(residual))
}
