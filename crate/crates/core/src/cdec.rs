//! Classical soft decoders: flooding min-sum belief propagation and ordered
//! statistics decoding with a weight-two combination sweep (OSD-CS).
//!
//! LLRs use `λ = log₂((1−q)/q)`, so a positive value means "probably not
//! flipped". Min-sum is invariant under rescaling of all LLRs, so the base
//! of the logarithm only affects reported posteriors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2;
use crate::tanner::{Side, TannerGraph};

/// Default iteration cap for per-line BP.
pub const DEFAULT_BP_ITERS: usize = 30;

/// Message magnitudes are clamped here so degree-one checks cannot produce
/// `inf − inf`.
const MSG_CAP: f64 = 1e12;

#[derive(Debug, Error, PartialEq)]
pub enum CdecError {
    #[error("{what}: expected length {expected}, got {got}")]
    DimensionMismatch { what: &'static str, expected: usize, got: usize },
    #[error("syndrome is outside the column space of the parity-check matrix")]
    Infeasible,
    #[error("prior probability {0} is not in (0, 1)")]
    InvalidPrior(f64),
    #[error("max_iters must be at least 1")]
    ZeroIterations,
}

/// Parity-check matrix in compressed form; edges are numbered check-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseParity {
    n_bits: usize,
    n_checks: usize,
    check_ptr: Vec<u32>,
    edge_bit: Vec<u32>,
    bit_ptr: Vec<u32>,
    bit_edges: Vec<u32>,
}

impl SparseParity {
    /// `rows[c]` lists the bits of check `c`.
    pub fn from_check_rows(n_bits: usize, rows: &[Vec<usize>]) -> Self {
        let mut check_ptr = Vec::with_capacity(rows.len() + 1);
        let mut edge_bit = Vec::new();
        check_ptr.push(0);
        for row in rows {
            edge_bit.extend(row.iter().map(|&b| b as u32));
            check_ptr.push(edge_bit.len() as u32);
        }
        let mut degree = vec![0u32; n_bits];
        for &b in &edge_bit {
            degree[b as usize] += 1;
        }
        let mut bit_ptr = vec![0u32; n_bits + 1];
        for b in 0..n_bits {
            bit_ptr[b + 1] = bit_ptr[b] + degree[b];
        }
        let mut fill = bit_ptr.clone();
        let mut bit_edges = vec![0u32; edge_bit.len()];
        for (e, &b) in edge_bit.iter().enumerate() {
            bit_edges[fill[b as usize] as usize] = e as u32;
            fill[b as usize] += 1;
        }
        Self { n_bits, n_checks: rows.len(), check_ptr, edge_bit, bit_ptr, bit_edges }
    }

    pub fn from_graph(graph: &TannerGraph, side: Side) -> Self {
        let rows: Vec<Vec<usize>> =
            (0..graph.side_checks(side)).map(|c| graph.side_check_neighbors(side, c).to_vec()).collect();
        Self::from_check_rows(graph.side_bits(side), &rows)
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }
    pub fn n_checks(&self) -> usize {
        self.n_checks
    }
    pub fn n_edges(&self) -> usize {
        self.edge_bit.len()
    }

    #[inline]
    fn check_edges(&self, c: usize) -> std::ops::Range<usize> {
        self.check_ptr[c] as usize..self.check_ptr[c + 1] as usize
    }

    pub fn check_bits(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.edge_bit[self.check_edges(c)].iter().map(|&b| b as usize)
    }

    pub fn syndrome(&self, error: &[u8]) -> Vec<u8> {
        (0..self.n_checks)
            .map(|c| self.check_bits(c).fold(0u8, |acc, b| acc ^ (error[b] & 1)))
            .collect()
    }
}

/// Per-bit log-likelihood ratios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LlrVector(pub Vec<f64>);

impl LlrVector {
    pub fn llr(q: f64) -> Result<f64, CdecError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(CdecError::InvalidPrior(q));
        }
        Ok(((1.0 - q) / q).log2())
    }

    pub fn uniform(n: usize, q: f64) -> Result<Self, CdecError> {
        Ok(Self(vec![Self::llr(q)?; n]))
    }

    pub fn from_probabilities(qs: &[f64]) -> Result<Self, CdecError> {
        qs.iter().map(|&q| Self::llr(q)).collect::<Result<Vec<_>, _>>().map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// When the min-sum loop ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BpStop {
    /// Stop at the first iteration whose hard decision matches the syndrome.
    OnConvergence,
    /// Always run every iteration.
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinSumConfig {
    pub max_iters: usize,
    /// Multiplier on check-to-bit messages; 1.0 is plain min-sum.
    pub scaling: f64,
    pub stop: BpStop,
    /// Keep check-to-bit messages of every iteration in the result.
    pub dump_messages: bool,
}

impl Default for MinSumConfig {
    fn default() -> Self {
        Self { max_iters: DEFAULT_BP_ITERS, scaling: 1.0, stop: BpStop::OnConvergence, dump_messages: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BpResult {
    pub posterior: Vec<f64>,
    /// Bit flipped iff its posterior is `≤ 0`.
    pub hard_decision: Vec<u8>,
    pub converged: bool,
    pub iterations: usize,
    pub messages: Option<Vec<Vec<f64>>>,
}

/// Flooding min-sum BP with syndrome-adjusted check signs.
pub fn min_sum(h: &SparseParity, syndrome: &[u8], channel: &[f64], cfg: &MinSumConfig) -> Result<BpResult, CdecError> {
    if syndrome.len() != h.n_checks {
        return Err(CdecError::DimensionMismatch { what: "syndrome", expected: h.n_checks, got: syndrome.len() });
    }
    if channel.len() != h.n_bits {
        return Err(CdecError::DimensionMismatch { what: "priors", expected: h.n_bits, got: channel.len() });
    }
    if cfg.max_iters == 0 {
        return Err(CdecError::ZeroIterations);
    }
    let mut v2c: Vec<f64> = h.edge_bit.iter().map(|&b| channel[b as usize]).collect();
    let mut c2v = vec![0.0f64; h.n_edges()];
    let mut posterior = channel.to_vec();
    let mut hard = vec![0u8; h.n_bits];
    let mut messages = cfg.dump_messages.then(Vec::new);
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=cfg.max_iters {
        iterations = it;
        for c in 0..h.n_checks {
            let edges = h.check_edges(c);
            let mut negative = syndrome[c] & 1 == 1;
            let (mut min1, mut min2, mut arg) = (f64::INFINITY, f64::INFINITY, usize::MAX);
            for e in edges.clone() {
                let x = v2c[e];
                negative ^= x < 0.0;
                let a = x.abs();
                if a < min1 {
                    min2 = min1;
                    min1 = a;
                    arg = e;
                } else if a < min2 {
                    min2 = a;
                }
            }
            for e in edges {
                let mag = if e == arg { min2 } else { min1 }.min(MSG_CAP);
                let neg = negative ^ (v2c[e] < 0.0);
                c2v[e] = cfg.scaling * if neg { -mag } else { mag };
            }
        }
        for b in 0..h.n_bits {
            let edges = h.bit_ptr[b] as usize..h.bit_ptr[b + 1] as usize;
            let total = channel[b] + h.bit_edges[edges.clone()].iter().map(|&e| c2v[e as usize]).sum::<f64>();
            posterior[b] = total;
            hard[b] = u8::from(total <= 0.0);
            for &e in &h.bit_edges[edges] {
                v2c[e as usize] = total - c2v[e as usize];
            }
        }
        if let Some(m) = messages.as_mut() {
            m.push(c2v.clone());
        }
        if cfg.stop == BpStop::OnConvergence || it == cfg.max_iters {
            converged = h.syndrome(&hard) == syndrome;
            if converged {
                break;
            }
        }
    }
    Ok(BpResult { posterior, hard_decision: hard, converged, iterations, messages })
}

/// Min-sum on the classical code selected by `side`, stopping on convergence.
pub fn bp_min_sum(
    graph: &TannerGraph,
    side: Side,
    syndrome: &[u8],
    priors: &LlrVector,
    max_iters: usize,
) -> Result<BpResult, CdecError> {
    let h = SparseParity::from_graph(graph, side);
    min_sum(&h, syndrome, &priors.0, &MinSumConfig { max_iters, ..MinSumConfig::default() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OsdOutput {
    pub correction: Vec<u8>,
    /// Order-zero solution `(ê_S | 0)`.
    pub osd0: Vec<u8>,
    /// Bits whose columns were chosen as the invertible set `S`.
    pub pivot_bits: Vec<usize>,
    /// The remaining bits `T`, most-likely-flipped first.
    pub free_bits: Vec<usize>,
}

/// OSD-CS: order bits most-likely-flipped first (ascending posterior LLR),
/// take the first independent columns as `S`, and return the lowest-weight
/// solution among all patterns of weight `≤ 2` on the remaining bits `T`.
pub fn osd_cs(h: &SparseParity, syndrome: &[u8], posterior: &[f64]) -> Result<OsdOutput, CdecError> {
    let (m, n) = (h.n_checks, h.n_bits);
    if syndrome.len() != m {
        return Err(CdecError::DimensionMismatch { what: "syndrome", expected: m, got: syndrome.len() });
    }
    if posterior.len() != n {
        return Err(CdecError::DimensionMismatch { what: "posterior", expected: n, got: posterior.len() });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| posterior[a].total_cmp(&posterior[b]));
    let mut position = vec![0usize; n];
    for (k, &b) in order.iter().enumerate() {
        position[b] = k;
    }

    // Dense rows over permuted columns, syndrome appended as column n.
    let width = gf2::words_for(n + 1);
    let mut rows: Vec<Vec<u64>> = (0..m)
        .map(|c| {
            let mut row = vec![0u64; width];
            for b in h.check_bits(c) {
                gf2::flip(&mut row, position[b]);
            }
            if syndrome[c] & 1 == 1 {
                gf2::flip(&mut row, n);
            }
            row
        })
        .collect();

    let mut pivots = Vec::new();
    for k in 0..n {
        let r = pivots.len();
        if r == m {
            break;
        }
        let Some(found) = (r..m).find(|&i| gf2::get(&rows[i], k)) else {
            continue;
        };
        rows.swap(r, found);
        let (head, tail) = rows.split_at_mut(r);
        let (pivot_row, rest) = tail.split_first_mut().expect("row r exists");
        for other in head.iter_mut().chain(rest.iter_mut()) {
            if gf2::get(other, k) {
                gf2::xor_into(other, pivot_row);
            }
        }
        pivots.push(k);
    }
    let rank = pivots.len();
    if rows[rank..].iter().any(|row| gf2::get(row, n)) {
        return Err(CdecError::Infeasible);
    }

    let rank_words = gf2::words_for(rank.max(1));
    let column = |k: usize| -> Vec<u64> {
        let mut v = vec![0u64; rank_words];
        for (i, row) in rows[..rank].iter().enumerate() {
            if gf2::get(row, k) {
                gf2::flip(&mut v, i);
            }
        }
        v
    };
    let rhs0 = column(n);
    let mut is_pivot = vec![false; n];
    for &k in &pivots {
        is_pivot[k] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&k| !is_pivot[k]).collect();
    let free_cols: Vec<Vec<u64>> = free.iter().map(|&k| column(k)).collect();

    let weight_of = |extra: &[usize]| -> (usize, usize) {
        let mut rhs = rhs0.clone();
        for &t in extra {
            gf2::xor_into(&mut rhs, &free_cols[t]);
        }
        let s: usize = rhs.iter().map(|w| w.count_ones() as usize).sum();
        (s + extra.len(), s)
    };
    let mut best: (usize, usize, Vec<usize>) = {
        let (w, s) = weight_of(&[]);
        (w, s, Vec::new())
    };
    let osd0_pattern = best.2.clone();
    let mut consider = |pattern: Vec<usize>| {
        let (w, s) = weight_of(&pattern);
        if (w, s) < (best.0, best.1) {
            best = (w, s, pattern);
        }
    };
    for a in 0..free.len() {
        consider(vec![a]);
    }
    for a in 0..free.len() {
        for b in a + 1..free.len() {
            consider(vec![a, b]);
        }
    }

    let assemble = |pattern: &[usize]| -> Vec<u8> {
        let mut rhs = rhs0.clone();
        for &t in pattern {
            gf2::xor_into(&mut rhs, &free_cols[t]);
        }
        let mut e = vec![0u8; n];
        for (i, &k) in pivots.iter().enumerate() {
            if gf2::get(&rhs, i) {
                e[order[k]] = 1;
            }
        }
        for &t in pattern {
            e[order[free[t]]] = 1;
        }
        e
    };
    Ok(OsdOutput {
        correction: assemble(&best.2),
        osd0: assemble(&osd0_pattern),
        pivot_bits: pivots.iter().map(|&k| order[k]).collect(),
        free_bits: free.iter().map(|&k| order[k]).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BposdOutput {
    pub correction: Vec<u8>,
    pub used_osd: bool,
    pub bp_iterations: usize,
}

/// BP followed by OSD-CS when BP does not converge, for one classical code
/// with a uniform prior.
#[derive(Clone, Debug)]
pub struct Bposd {
    h: SparseParity,
    channel: Vec<f64>,
    config: MinSumConfig,
}

impl Bposd {
    pub fn new(graph: &TannerGraph, side: Side, prior_q: f64) -> Result<Self, CdecError> {
        let h = SparseParity::from_graph(graph, side);
        let channel = LlrVector::uniform(h.n_bits(), prior_q)?.0;
        Ok(Self { h, channel, config: MinSumConfig::default() })
    }

    pub fn with_config(mut self, config: MinSumConfig) -> Self {
        self.config = config;
        self
    }

    pub fn parity(&self) -> &SparseParity {
        &self.h
    }

    pub fn decode(&self, syndrome: &[u8]) -> Result<BposdOutput, CdecError> {
        let bp = min_sum(&self.h, syndrome, &self.channel, &self.config)?;
        if bp.converged {
            return Ok(BposdOutput { correction: bp.hard_decision, used_osd: false, bp_iterations: bp.iterations });
        }
        let osd = osd_cs(&self.h, syndrome, &bp.posterior)?;
        Ok(BposdOutput { correction: osd.correction, used_osd: true, bp_iterations: bp.iterations })
    }
}

/// One-shot BP+OSD on the classical code selected by `side`.
pub fn bposd(graph: &TannerGraph, side: Side, syndrome: &[u8], prior_q: f64) -> Result<BposdOutput, CdecError> {
    Bposd::new(graph, side, prior_q)?.decode(syndrome)
}
