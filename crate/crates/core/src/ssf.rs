//! Small-Set-Flip decoding.
//!
//! Every Z generator keeps the best flip inside its support together with
//! its score `Δ|σ| / |F|`. A lazily pruned max-heap yields the generator to
//! apply next; after a flip only the generators whose local view touches a
//! toggled check are rescored.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hgp::{local_view, quantum_syndrome, ErrorSupport, FlipSet, HgpCode, LocalView, Syndrome};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SsfError {
    #[error("waterfall needs a (3,4) local view of weight at most 3, got {rows}x{cols} with weight {weight}")]
    WaterfallIneligible { rows: usize, cols: usize, weight: u32 },
}

/// Exact score `delta / size`; the empty flip is `0 / 0` and counts as zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Score {
    pub delta: i32,
    pub size: u32,
}

impl Score {
    pub const ZERO: Score = Score { delta: 0, size: 0 };

    pub fn new(delta: i32, size: u32) -> Self {
        Self { delta, size }
    }

    #[inline]
    fn den(&self) -> i64 {
        self.size.max(1) as i64
    }

    pub fn value(&self) -> f64 {
        self.delta as f64 / self.den() as f64
    }

    pub fn is_positive(&self) -> bool {
        self.delta > 0
    }

    /// Compares the ratios only, by cross-multiplication.
    #[inline]
    pub fn cmp_value(&self, other: &Score) -> Ordering {
        (self.delta as i64 * other.den()).cmp(&(other.delta as i64 * self.den()))
    }

    /// Higher ratio first, then the smaller flip.
    #[inline]
    pub fn cmp_preference(&self, other: &Score) -> Ordering {
        self.cmp_value(other).then(other.size.cmp(&self.size))
    }
}

/// A generator's best flip and its score.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestFlip {
    pub flip: FlipSet,
    pub score: Score,
}

impl BestFlip {
    pub fn empty(generator: usize) -> Self {
        Self { flip: FlipSet::empty(generator), score: Score::ZERO }
    }
}

/// Position of `mask` in the reflected Gray sequence.
#[inline]
pub fn gray_rank(mask: u32) -> u32 {
    let mut x = mask;
    let mut shift = mask >> 1;
    while shift != 0 {
        x ^= shift;
        shift >>= 1;
    }
    x
}

#[inline]
pub fn gray_code(t: u32) -> u32 {
    t ^ (t >> 1)
}

/// Flip-set mask layout used by the scorers: bits `0..rows` select rows
/// (VV qubits), bits `rows..rows+cols` select columns (CC qubits).
#[inline]
fn split_mask(view: &LocalView, mask: u32) -> FlipSet {
    let row_bits = (1u32 << view.n_rows) - 1;
    FlipSet { generator: view.generator, rows: mask & row_bits, cols: mask >> view.n_rows }
}

#[inline]
fn join_mask(view: &LocalView, flip: &FlipSet) -> u32 {
    flip.rows | (flip.cols << view.n_rows)
}

/// Syndrome-weight decrease from flipping `flip`, read from the local view:
/// unique-neighborhood checks toggle, every other check is unchanged.
pub fn local_delta(view: &LocalView, flip: &FlipSet) -> i32 {
    let mut delta = 0;
    for i in 0..view.n_rows {
        let row_in = (flip.rows >> i) & 1;
        for j in 0..view.n_cols {
            if row_in ^ ((flip.cols >> j) & 1) == 1 {
                delta += if view.get(i, j) { 1 } else { -1 };
            }
        }
    }
    delta
}

/// Score of `flip` computed from the generator's local view.
pub fn score(code: &HgpCode, syndrome: &Syndrome, flip: &FlipSet) -> Score {
    if flip.is_empty() {
        return Score::ZERO;
    }
    let view = local_view(code, flip.generator, syndrome);
    Score::new(local_delta(&view, flip), flip.size())
}

/// Score of `flip` from `|σ| − |σ ⊕ σ(F)|`, touching the whole syndrome.
pub fn score_global(code: &HgpCode, syndrome: &Syndrome, flip: &FlipSet) -> Score {
    if flip.is_empty() {
        return Score::ZERO;
    }
    let f = ErrorSupport::from_qubits(code, flip.qubits(code)).expect("flip qubits are in range");
    let mut after = syndrome.clone();
    after.xor_with(&quantum_syndrome(code, &f));
    Score::new(syndrome.weight() as i32 - after.weight() as i32, flip.size())
}

/// Exhaustive best flip, visiting subsets in Gray order so each step toggles
/// one row or column.
///
/// For a fixed column selection `F_C`, selecting row `i` changes the tally
/// by a constant gain, so row steps cost one addition; the gains are
/// refreshed only when a column toggles. Ties resolve to the smaller flip,
/// then the earlier Gray position.
pub fn best_flip_gray(view: &LocalView) -> BestFlip {
    let (nr, nc) = (view.n_rows, view.n_cols);
    let all_cols = (1u32 << nc) - 1;
    let mut rows = [0u32; 16];
    for i in 0..nr {
        rows[i] = view.rows[i] as u32;
    }
    // Contribution of row i's checks in column set `a`: +1 unsatisfied, −1 satisfied.
    let part = |i: usize, a: u32| 2 * (rows[i] & a).count_ones() as i32 - a.count_ones() as i32;

    let mut gain = [0i32; 16];
    let (mut fr, mut fc) = (0u32, 0u32);
    let mut delta = 0i32;
    let mut size = 0i32;
    for (i, g) in gain.iter_mut().enumerate().take(nr) {
        *g = part(i, all_cols);
    }
    let (mut best_delta, mut best_size, mut best_mask) = (0i32, 0i32, 0u32);
    for t in 1..(1u32 << (nr + nc)) {
        let b = t.trailing_zeros() as usize;
        if b < nr {
            let bit = 1u32 << b;
            fr ^= bit;
            if fr & bit != 0 {
                delta += gain[b];
                size += 1;
            } else {
                delta -= gain[b];
                size -= 1;
            }
        } else {
            fc ^= 1 << (b - nr);
            let rest = !fc & all_cols;
            delta = 0;
            for i in 0..nr {
                let (on, off) = (part(i, rest), part(i, fc));
                gain[i] = on - off;
                delta += if (fr >> i) & 1 == 1 { on } else { off };
            }
            size = (fr.count_ones() + fc.count_ones()) as i32;
        }
        let lhs = delta * best_size.max(1);
        let rhs = best_delta * size;
        if lhs > rhs || (lhs == rhs && size < best_size) {
            best_delta = delta;
            best_size = size;
            best_mask = fr | (fc << nr);
        }
    }
    BestFlip { flip: split_mask(view, best_mask), score: Score::new(best_delta, best_size as u32) }
}

/// Reference scorer: every subset in lexicographic order, each scored from
/// scratch. Same tie-break as [`best_flip_gray`].
pub fn best_flip_naive(view: &LocalView) -> BestFlip {
    let (nr, nc) = (view.n_rows, view.n_cols);
    let mut best = Score::ZERO;
    let mut best_mask = 0u32;
    for mask in 1..(1u32 << (nr + nc)) {
        let flip = split_mask(view, mask);
        let s = Score::new(local_delta(view, &flip), flip.size());
        let better = match s.cmp_preference(&best) {
            Ordering::Greater => true,
            Ordering::Equal => gray_rank(mask) < gray_rank(best_mask),
            Ordering::Less => false,
        };
        if better {
            best = s;
            best_mask = mask;
        }
    }
    BestFlip { flip: split_mask(view, best_mask), score: best }
}

/// `true` when [`waterfall`] applies: a (3,4) view (4 rows, 3 columns) with
/// at most three unsatisfied checks.
#[inline]
pub fn waterfall_eligible(view: &LocalView) -> bool {
    view.n_rows == 4 && view.n_cols == 3 && view.weight() <= 3
}

/// Constant-time best flip for light (3,4) local views.
///
/// Cascade: a row with two or more unsatisfied checks; else a column with
/// three; else a column with two plus a row whose single unsatisfied check
/// lies in another column; else nothing. In the last branch several pairs
/// can qualify, and the earliest in Gray order is taken so the result agrees
/// with [`best_flip_gray`] exactly.
pub fn waterfall(view: &LocalView) -> Result<BestFlip, SsfError> {
    if !waterfall_eligible(view) {
        return Err(SsfError::WaterfallIneligible { rows: view.n_rows, cols: view.n_cols, weight: view.weight() });
    }
    let g = view.generator;
    for i in 0..4 {
        let r = view.row_weight(i);
        if r >= 2 {
            let flip = FlipSet { generator: g, rows: 1 << i, cols: 0 };
            return Ok(BestFlip { flip, score: Score::new(2 * r as i32 - 3, 1) });
        }
    }
    for j in 0..3 {
        if view.col_weight(j) == 3 {
            let flip = FlipSet { generator: g, rows: 0, cols: 1 << j };
            return Ok(BestFlip { flip, score: Score::new(2, 1) });
        }
    }
    let mut best: Option<(u32, FlipSet)> = None;
    for j in 0..3 {
        if view.col_weight(j) != 2 {
            continue;
        }
        for i in 0..4 {
            if view.row_weight(i) == 1 && !view.get(i, j) {
                let flip = FlipSet { generator: g, rows: 1 << i, cols: 1 << j };
                let rank = gray_rank(join_mask(view, &flip));
                if best.is_none_or(|(r, _)| rank < r) {
                    best = Some((rank, flip));
                }
            }
        }
    }
    Ok(match best {
        Some((_, flip)) => BestFlip { flip, score: Score::new(1, 2) },
        None => BestFlip::empty(g),
    })
}

/// Exhaustive scorer used for views the fast path does not cover.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScorerKind {
    #[default]
    Gray,
    Naive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsfOptions {
    /// Only score generators whose local view has an unsatisfied check.
    pub skip_untouched: bool,
    /// Route eligible (3,4) views through [`waterfall`].
    pub waterfall: bool,
    pub scorer: ScorerKind,
    /// Cross-check every heap pop against a linear scan of all generators.
    pub audit: bool,
    /// Keep every local view handed to the exhaustive scorer.
    pub capture_views: bool,
}

impl Default for SsfOptions {
    fn default() -> Self {
        Self {
            skip_untouched: true,
            waterfall: true,
            scorer: ScorerKind::Gray,
            audit: cfg!(debug_assertions),
            capture_views: false,
        }
    }
}

impl SsfOptions {
    /// Full enumeration of every generator, lexicographic scorer.
    pub fn naive() -> Self {
        Self { skip_untouched: false, waterfall: false, scorer: ScorerKind::Naive, ..Self::default() }
    }
    pub fn gray() -> Self {
        Self { skip_untouched: false, waterfall: false, ..Self::default() }
    }
    pub fn gray_skip() -> Self {
        Self { waterfall: false, ..Self::default() }
    }
    pub fn gray_skip_waterfall() -> Self {
        Self::default()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppliedFlip {
    pub flip: FlipSet,
    pub score: Score,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsfTrace {
    pub iterations: usize,
    /// Syndrome weight before each iteration, then the final weight.
    pub weights: Vec<usize>,
    pub flips: Vec<AppliedFlip>,
    /// Calls to the exhaustive scorer.
    pub score_gen_calls: u64,
    pub waterfall_calls: u64,
    pub heap_pushes: u64,
    pub heap_pops: u64,
    pub stale_pops: u64,
    pub init_ns: u64,
    pub loop_ns: u64,
    #[serde(skip)]
    pub views: Vec<LocalView>,
}

impl SsfTrace {
    /// `true` iff the recorded syndrome weights strictly decrease.
    pub fn is_strictly_descending(&self) -> bool {
        self.weights.windows(2).all(|w| w[1] < w[0])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SsfOutcome {
    pub correction: ErrorSupport,
    pub residual: Syndrome,
    pub trace: SsfTrace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct HeapEntry {
    score: Score,
    generator: u32,
    version: u32,
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .cmp_preference(&other.score)
            .then(other.generator.cmp(&self.generator))
            .then(self.version.cmp(&other.version))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Max-heap over generator scores with lazy deletion: a generator's entry is
/// live only while its version matches the current counter.
#[derive(Clone, Debug)]
pub struct LookupTable {
    heap: BinaryHeap<HeapEntry>,
    version: Vec<u32>,
    best: Vec<Option<BestFlip>>,
    pub pushes: u64,
    pub pops: u64,
    pub stale: u64,
}

impl LookupTable {
    pub fn new(n_generators: usize) -> Self {
        Self {
            heap: BinaryHeap::new(),
            version: vec![0; n_generators],
            best: vec![None; n_generators],
            pushes: 0,
            pops: 0,
            stale: 0,
        }
    }

    /// Replaces the entry of `best.flip.generator`.
    pub fn insert(&mut self, best: BestFlip) {
        let g = best.flip.generator;
        self.version[g] = self.version[g].wrapping_add(1);
        self.best[g] = Some(best);
        self.heap.push(HeapEntry { score: best.score, generator: g as u32, version: self.version[g] });
        self.pushes += 1;
    }

    /// Drops the entry of generator `g`.
    pub fn remove(&mut self, g: usize) {
        if self.best[g].take().is_some() {
            self.version[g] = self.version[g].wrapping_add(1);
        }
    }

    pub fn get(&self, g: usize) -> Option<BestFlip> {
        self.best[g]
    }

    /// Best live entry, discarding stale ones on the way.
    pub fn find_best(&mut self) -> Option<BestFlip> {
        while let Some(top) = self.heap.peek().copied() {
            let g = top.generator as usize;
            if self.best[g].is_some() && self.version[g] == top.version {
                return self.best[g];
            }
            self.heap.pop();
            self.pops += 1;
            self.stale += 1;
        }
        None
    }

    /// Best live entry by linear scan.
    pub fn scan_best(&self) -> Option<BestFlip> {
        let mut out: Option<BestFlip> = None;
        for b in self.best.iter().flatten() {
            if out.is_none_or(|o| b.score.cmp_preference(&o.score) == Ordering::Greater) {
                out = Some(*b);
            }
        }
        out
    }

    pub fn live_len(&self) -> usize {
        self.best.iter().filter(|b| b.is_some()).count()
    }
}

struct Decoder<'a> {
    code: &'a HgpCode,
    opts: SsfOptions,
    syndrome: Syndrome,
    correction: ErrorSupport,
    table: LookupTable,
    trace: SsfTrace,
    stamp: Vec<u32>,
    epoch: u32,
    use_waterfall: bool,
}

impl<'a> Decoder<'a> {
    fn score_view(&mut self, view: &LocalView) -> BestFlip {
        if self.use_waterfall && waterfall_eligible(view) {
            self.trace.waterfall_calls += 1;
            return waterfall(view).expect("eligibility checked");
        }
        self.trace.score_gen_calls += 1;
        if self.opts.capture_views {
            self.trace.views.push(*view);
        }
        match self.opts.scorer {
            ScorerKind::Gray => best_flip_gray(view),
            ScorerKind::Naive => best_flip_naive(view),
        }
    }

    fn rescore(&mut self, g: usize) {
        let view = local_view(self.code, g, &self.syndrome);
        if self.opts.skip_untouched && view.is_zero() {
            self.table.remove(g);
            return;
        }
        let best = self.score_view(&view);
        self.table.insert(best);
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.epoch
    }

    fn audit(&self, popped: Option<BestFlip>) {
        let mut scan: Option<BestFlip> = None;
        for g in 0..self.code.n_generators() {
            let b = best_flip_gray(&local_view(self.code, g, &self.syndrome));
            if scan.is_none_or(|s| b.score.cmp_preference(&s.score) == Ordering::Greater) {
                scan = Some(b);
            }
        }
        let scan = scan.filter(|b| b.score.is_positive());
        let popped = popped.filter(|b| b.score.is_positive());
        assert_eq!(popped, scan, "lookup table disagrees with a linear scan");
    }

    fn run(mut self) -> SsfOutcome {
        let t0 = Instant::now();
        let n_gen = self.code.n_generators();
        if self.opts.skip_untouched {
            let epoch = self.next_epoch();
            let mut touched = Vec::new();
            for x in self.syndrome.sorted_checks() {
                self.code.for_each_check_generator(x, |g| {
                    if self.stamp[g] != epoch {
                        self.stamp[g] = epoch;
                        touched.push(g);
                    }
                });
            }
            touched.sort_unstable();
            for g in touched {
                self.rescore(g);
            }
        } else {
            for g in 0..n_gen {
                self.rescore(g);
            }
        }
        let t1 = Instant::now();

        loop {
            self.trace.weights.push(self.syndrome.weight());
            let best = self.table.find_best();
            if self.opts.audit {
                self.audit(best);
            }
            let Some(best) = best.filter(|b| b.score.is_positive()) else {
                break;
            };
            self.apply(best);
        }
        self.trace.init_ns = (t1 - t0).as_nanos() as u64;
        self.trace.loop_ns = t1.elapsed().as_nanos() as u64;
        self.trace.heap_pushes = self.table.pushes;
        self.trace.heap_pops = self.table.pops;
        self.trace.stale_pops = self.table.stale;
        SsfOutcome { correction: self.correction, residual: self.syndrome, trace: self.trace }
    }

    fn apply(&mut self, best: BestFlip) {
        let flip = best.flip;
        for q in flip.qubits(self.code) {
            self.correction.toggle(q);
        }
        let (rows, cols) = self.code.local_axes(flip.generator);
        let m = self.code.m();
        let mut toggled = [0usize; 256];
        let mut n_toggled = 0;
        for (i, &v1) in rows.iter().enumerate() {
            let row_in = (flip.rows >> i) & 1;
            for (j, &c2) in cols.iter().enumerate() {
                if row_in ^ ((flip.cols >> j) & 1) == 1 {
                    let x = v1 * m + c2;
                    self.syndrome.toggle(x);
                    toggled[n_toggled] = x;
                    n_toggled += 1;
                }
            }
        }
        self.trace.iterations += 1;
        self.trace.flips.push(AppliedFlip { flip, score: best.score });

        let epoch = self.next_epoch();
        let mut dirty = Vec::with_capacity(n_toggled * 12);
        for &x in &toggled[..n_toggled] {
            self.code.for_each_check_generator(x, |g| {
                if self.stamp[g] != epoch {
                    self.stamp[g] = epoch;
                    dirty.push(g);
                }
            });
        }
        dirty.sort_unstable();
        for g in dirty {
            self.rescore(g);
        }
    }
}

/// Runs SSF on `syndrome` until no flip has positive score.
pub fn ssf_decode(code: &HgpCode, syndrome: &Syndrome, options: &SsfOptions) -> SsfOutcome {
    let n_gen = code.n_generators();
    let decoder = Decoder {
        code,
        opts: *options,
        syndrome: syndrome.clone(),
        correction: ErrorSupport::empty(code),
        table: LookupTable::new(n_gen),
        trace: SsfTrace::default(),
        stamp: vec![0; n_gen],
        epoch: 0,
        use_waterfall: options.waterfall && code.is_34(),
    };
    decoder.run()
}
