//! Biregular bipartite Tanner graphs and their classical codes.
//!
//! A graph `G = (V ∪ C, E)` defines two classical codes: the code whose bits
//! are `V` and whose checks are `C`, and the dual code obtained by swapping
//! the roles of the two sides. [`Side`] selects between them.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Number of times PEG reseeds itself before giving up.
pub const PEG_MAX_ATTEMPTS: u32 = 64;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("no connected biregular graph found after {0} attempts")]
    RetriesExhausted(u32),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate edge ({bit}, {check})")]
    DuplicateEdge { bit: usize, check: usize },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which classical code of the graph is addressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Side {
    /// Bits are `V`, checks are `C`.
    Primal,
    /// Bits are `C`, checks are `V`.
    Dual,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TannerGraph {
    n_bits: usize,
    n_checks: usize,
    deg_bit: usize,
    deg_check: usize,
    bit_checks: Vec<Vec<usize>>,
    check_bits: Vec<Vec<usize>>,
    seed: u64,
}

impl TannerGraph {
    /// Builds a graph from an edge list, keeping edge order in both
    /// adjacency directions, and checks every invariant.
    pub fn from_edges(
        n_bits: usize,
        n_checks: usize,
        deg_bit: usize,
        deg_check: usize,
        edges: &[(usize, usize)],
        seed: u64,
    ) -> Result<Self, GraphError> {
        let mut bit_checks = vec![Vec::with_capacity(deg_bit); n_bits];
        let mut check_bits = vec![Vec::with_capacity(deg_check); n_checks];
        for &(b, c) in edges {
            if b >= n_bits || c >= n_checks {
                return Err(GraphError::DegreeMismatch(format!("edge ({b}, {c}) out of range")));
            }
            if bit_checks[b].contains(&c) {
                return Err(GraphError::DuplicateEdge { bit: b, check: c });
            }
            bit_checks[b].push(c);
            check_bits[c].push(b);
        }
        let g = Self { n_bits, n_checks, deg_bit, deg_check, bit_checks, check_bits, seed };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), GraphError> {
        if self.n_bits * self.deg_bit != self.n_checks * self.deg_check {
            return Err(GraphError::DegreeMismatch(format!(
                "{}·{} != {}·{}",
                self.n_bits, self.deg_bit, self.n_checks, self.deg_check
            )));
        }
        if let Some((b, l)) = self.bit_checks.iter().enumerate().find(|(_, l)| l.len() != self.deg_bit) {
            return Err(GraphError::DegreeMismatch(format!(
                "bit {b} has degree {} (expected {})",
                l.len(),
                self.deg_bit
            )));
        }
        if let Some((c, l)) = self.check_bits.iter().enumerate().find(|(_, l)| l.len() != self.deg_check) {
            return Err(GraphError::DegreeMismatch(format!(
                "check {c} has degree {} (expected {})",
                l.len(),
                self.deg_check
            )));
        }
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(())
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }
    pub fn n_checks(&self) -> usize {
        self.n_checks
    }
    pub fn deg_bit(&self) -> usize {
        self.deg_bit
    }
    pub fn deg_check(&self) -> usize {
        self.deg_check
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn n_edges(&self) -> usize {
        self.n_bits * self.deg_bit
    }

    /// Checks adjacent to bit `b`, in edge order.
    #[inline]
    pub fn bit_neighbors(&self, b: usize) -> &[usize] {
        &self.bit_checks[b]
    }

    /// Bits adjacent to check `c`, in edge order.
    #[inline]
    pub fn check_neighbors(&self, c: usize) -> &[usize] {
        &self.check_bits[c]
    }

    /// Bit count of the code selected by `side`.
    pub fn side_bits(&self, side: Side) -> usize {
        match side {
            Side::Primal => self.n_bits,
            Side::Dual => self.n_checks,
        }
    }

    /// Check count of the code selected by `side`.
    pub fn side_checks(&self, side: Side) -> usize {
        match side {
            Side::Primal => self.n_checks,
            Side::Dual => self.n_bits,
        }
    }

    /// Checks of bit `b` in the code selected by `side`.
    #[inline]
    pub fn side_bit_neighbors(&self, side: Side, b: usize) -> &[usize] {
        match side {
            Side::Primal => &self.bit_checks[b],
            Side::Dual => &self.check_bits[b],
        }
    }

    /// Bits of check `c` in the code selected by `side`.
    #[inline]
    pub fn side_check_neighbors(&self, side: Side, c: usize) -> &[usize] {
        match side {
            Side::Primal => &self.check_bits[c],
            Side::Dual => &self.bit_checks[c],
        }
    }

    /// Edges in bit-major order, as written by [`TannerGraph::save`].
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.bit_checks
            .iter()
            .enumerate()
            .flat_map(|(b, cs)| cs.iter().map(move |&c| (b, c)))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n_bits == 0 {
            return self.n_checks == 0;
        }
        let mut seen_bits = vec![false; self.n_bits];
        let mut seen_checks = vec![false; self.n_checks];
        let mut queue = VecDeque::from([0usize]);
        seen_bits[0] = true;
        while let Some(b) = queue.pop_front() {
            for &c in &self.bit_checks[b] {
                if !seen_checks[c] {
                    seen_checks[c] = true;
                    for &b2 in &self.check_bits[c] {
                        if !seen_bits[b2] {
                            seen_bits[b2] = true;
                            queue.push_back(b2);
                        }
                    }
                }
            }
        }
        seen_bits.iter().all(|&s| s) && seen_checks.iter().all(|&s| s)
    }

    /// Length of the shortest cycle, or `None` for a forest.
    pub fn girth(&self) -> Option<usize> {
        // Vertices 0..n_bits are bits, n_bits.. are checks.
        let nv = self.n_bits + self.n_checks;
        let neighbors = |v: usize| -> Vec<usize> {
            if v < self.n_bits {
                self.bit_checks[v].iter().map(|&c| c + self.n_bits).collect()
            } else {
                self.check_bits[v - self.n_bits].clone()
            }
        };
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; nv];
        let mut parent = vec![usize::MAX; nv];
        for root in 0..nv {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[root] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for w in neighbors(u) {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else if parent[u] != w {
                        let cycle = dist[u] + dist[w] + 1;
                        best = Some(best.map_or(cycle, |b| b.min(cycle)));
                    }
                }
            }
        }
        best
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# seed {}", self.seed);
        let _ = writeln!(out, "{} {} {} {}", self.n_bits, self.n_checks, self.deg_bit, self.deg_check);
        for (b, c) in self.edges() {
            let _ = writeln!(out, "{b} {c}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut header: Option<[usize; 4]> = None;
        let mut edges = Vec::new();
        let mut seed = 0u64;
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(s) = comment.trim().strip_prefix("seed") {
                    seed = s.trim().parse().map_err(|_| GraphError::Parse {
                        line: line_no,
                        msg: format!("bad seed comment {raw:?}"),
                    })?;
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let fields: Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
            let fields = fields.map_err(|e| GraphError::Parse { line: line_no, msg: e.to_string() })?;
            match header {
                None => {
                    let [n, m, dv, dc] = fields[..] else {
                        return Err(GraphError::Parse {
                            line: line_no,
                            msg: "header needs `n_bits n_checks deg_bit deg_check`".into(),
                        });
                    };
                    header = Some([n, m, dv, dc]);
                }
                Some([n, m, _, _]) => {
                    let [b, c] = fields[..] else {
                        return Err(GraphError::Parse { line: line_no, msg: "edge needs `bit check`".into() });
                    };
                    if b >= n || c >= m {
                        return Err(GraphError::Parse {
                            line: line_no,
                            msg: format!("edge ({b}, {c}) out of range"),
                        });
                    }
                    edges.push((b, c));
                }
            }
        }
        let [n, m, dv, dc] = header.ok_or(GraphError::Parse { line: 0, msg: "missing header".into() })?;
        Self::from_edges(n, m, dv, dc, &edges, seed)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), GraphError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Progressive Edge Growth construction of a connected biregular graph.
///
/// Bits are processed in index order. Each new edge of a bit goes to a check
/// with spare degree that is as far as possible from the bit in the current
/// graph (unreachable counts as farthest), then of minimum current degree,
/// then earliest in a seed-keyed shuffle of the checks. Any 4-cycles left
/// over are removed by degree-preserving edge swaps, and the whole attempt is
/// reseeded (up to [`PEG_MAX_ATTEMPTS`] times) until the girth reaches 6
/// where that is combinatorially possible; otherwise the best attempt wins.
pub fn peg_construct(
    n_bits: usize,
    n_checks: usize,
    deg_bit: usize,
    deg_check: usize,
    seed: u64,
) -> Result<TannerGraph, GraphError> {
    if deg_bit == 0 || deg_check == 0 || n_bits == 0 || n_checks == 0 {
        return Err(GraphError::Infeasible("sizes and degrees must be positive".into()));
    }
    if n_bits * deg_bit != n_checks * deg_check {
        return Err(GraphError::Infeasible(format!(
            "{n_bits}·{deg_bit} != {n_checks}·{deg_check}"
        )));
    }
    if deg_bit > n_checks || deg_check > n_bits {
        return Err(GraphError::Infeasible("degree exceeds the opposite side size".into()));
    }
    // The greedy can close a short cycle on the last few bits; reseeded
    // attempts are tried until one reaches the girth target.
    let target = peg_girth_target(n_bits, n_checks, deg_bit, deg_check);
    let mut best: Option<(usize, TannerGraph)> = None;
    for attempt in 0..PEG_MAX_ATTEMPTS {
        let attempt_seed = seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        if let Some(edges) = peg_attempt(n_bits, n_checks, deg_bit, deg_check, attempt_seed) {
            match TannerGraph::from_edges(n_bits, n_checks, deg_bit, deg_check, &edges, seed) {
                Ok(g) => {
                    let girth = g.girth().unwrap_or(usize::MAX);
                    if girth >= target {
                        return Ok(g);
                    }
                    if best.as_ref().is_none_or(|(b, _)| girth > *b) {
                        best = Some((girth, g));
                    }
                }
                Err(GraphError::Disconnected) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    best.map(|(_, g)| g).ok_or(GraphError::RetriesExhausted(PEG_MAX_ATTEMPTS))
}

/// Girth at which [`peg_construct`] stops retrying: 6 whenever two bits can
/// avoid sharing two checks at all, otherwise 4.
fn peg_girth_target(n_bits: usize, n_checks: usize, deg_bit: usize, deg_check: usize) -> usize {
    let pairs_used = n_checks * deg_check * (deg_check - 1) / 2;
    let pairs_available = n_bits * (n_bits - 1) / 2;
    if deg_bit >= 2 && deg_check >= 2 && pairs_used <= pairs_available && deg_bit * (deg_check - 1) < n_bits {
        6
    } else {
        4
    }
}

fn peg_attempt(n_bits: usize, n_checks: usize, deg_bit: usize, deg_check: usize, seed: u64) -> Option<Vec<(usize, usize)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n_checks).collect();
    order.shuffle(&mut rng);
    let mut rank = vec![0usize; n_checks];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }

    let mut bit_checks: Vec<Vec<usize>> = vec![Vec::with_capacity(deg_bit); n_bits];
    let mut check_bits: Vec<Vec<usize>> = vec![Vec::with_capacity(deg_check); n_checks];
    let mut edges = Vec::with_capacity(n_bits * deg_bit);
    let mut depth = vec![u32::MAX; n_checks];
    let mut seen_bits = vec![false; n_bits];

    for b in 0..n_bits {
        for _ in 0..deg_bit {
            check_depths(&bit_checks, &check_bits, b, &mut depth, &mut seen_bits);
            let chosen = (0..n_checks)
                .filter(|&c| check_bits[c].len() < deg_check && depth[c] != 0)
                .max_by(|&x, &y| {
                    depth[x]
                        .cmp(&depth[y])
                        .then(check_bits[y].len().cmp(&check_bits[x].len()))
                        .then(rank[y].cmp(&rank[x]))
                })?;
            bit_checks[b].push(chosen);
            check_bits[chosen].push(b);
            edges.push((b, chosen));
        }
    }
    if break_four_cycles(&mut bit_checks, &mut check_bits, &mut rng) {
        edges = bit_checks.iter().enumerate().flat_map(|(b, cs)| cs.iter().map(move |&c| (b, c))).collect();
    }
    Some(edges)
}

/// Number of bit pairs that share two or more checks.
fn four_cycle_pairs(bit_checks: &[Vec<usize>], check_bits: &[Vec<usize>]) -> usize {
    let mut shared = vec![0u32; bit_checks.len()];
    let mut count = 0;
    for (a, checks) in bit_checks.iter().enumerate() {
        shared.iter_mut().for_each(|s| *s = 0);
        for &c in checks {
            for &b in &check_bits[c] {
                if b > a {
                    shared[b] += 1;
                    if shared[b] == 2 {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Degree-preserving edge swaps that remove 4-cycles left by the greedy
/// pass. Returns `true` if any edge moved.
fn break_four_cycles(bit_checks: &mut [Vec<usize>], check_bits: &mut [Vec<usize>], rng: &mut ChaCha8Rng) -> bool {
    let mut count = four_cycle_pairs(bit_checks, check_bits);
    let mut changed = false;
    let max_rounds = 4 * bit_checks.len();
    for _ in 0..max_rounds {
        if count == 0 {
            break;
        }
        let Some((b, c)) = first_four_cycle_edge(bit_checks, check_bits) else {
            break;
        };
        let mut candidates: Vec<(usize, usize)> =
            bit_checks.iter().enumerate().flat_map(|(b2, cs)| cs.iter().map(move |&c2| (b2, c2))).collect();
        candidates.shuffle(rng);
        let mut improved = false;
        for (b2, c2) in candidates {
            if b2 == b || c2 == c || bit_checks[b].contains(&c2) || bit_checks[b2].contains(&c) {
                continue;
            }
            swap_edges(bit_checks, check_bits, (b, c), (b2, c2));
            let next = four_cycle_pairs(bit_checks, check_bits);
            if next < count {
                count = next;
                improved = true;
                changed = true;
                break;
            }
            swap_edges(bit_checks, check_bits, (b, c2), (b2, c));
        }
        if !improved {
            break;
        }
    }
    changed
}

fn first_four_cycle_edge(bit_checks: &[Vec<usize>], check_bits: &[Vec<usize>]) -> Option<(usize, usize)> {
    for (a, checks) in bit_checks.iter().enumerate() {
        for &c in checks {
            for &b in &check_bits[c] {
                if b != a && bit_checks[b].iter().filter(|x| checks.contains(x)).count() >= 2 {
                    return Some((b, c));
                }
            }
        }
    }
    None
}

/// Replaces edges `(b, c)` and `(b2, c2)` by `(b, c2)` and `(b2, c)`.
fn swap_edges(bit_checks: &mut [Vec<usize>], check_bits: &mut [Vec<usize>], (b, c): (usize, usize), (b2, c2): (usize, usize)) {
    let replace = |v: &mut Vec<usize>, from: usize, to: usize| {
        let slot = v.iter().position(|&x| x == from).expect("edge present");
        v[slot] = to;
    };
    replace(&mut bit_checks[b], c, c2);
    replace(&mut bit_checks[b2], c2, c);
    replace(&mut check_bits[c], b, b2);
    replace(&mut check_bits[c2], b2, b);
}

/// BFS depth (in check layers) of every check from bit `start`;
/// `u32::MAX` marks unreachable checks and 0 marks direct neighbors.
fn check_depths(
    bit_checks: &[Vec<usize>],
    check_bits: &[Vec<usize>],
    start: usize,
    depth: &mut [u32],
    seen_bits: &mut [bool],
) {
    depth.iter_mut().for_each(|d| *d = u32::MAX);
    seen_bits.iter_mut().for_each(|s| *s = false);
    seen_bits[start] = true;
    let mut frontier = vec![start];
    let mut level = 0u32;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &b in &frontier {
            for &c in &bit_checks[b] {
                if depth[c] == u32::MAX {
                    depth[c] = level;
                    for &b2 in &check_bits[c] {
                        if !seen_bits[b2] {
                            seen_bits[b2] = true;
                            next.push(b2);
                        }
                    }
                }
            }
        }
        frontier = next;
        level += 1;
    }
}

/// `H e` for the code selected by `side`, as a 0/1 vector over its checks.
pub fn classical_syndrome(graph: &TannerGraph, error: &[u8], side: Side) -> Result<Vec<u8>, GraphError> {
    let n = graph.side_bits(side);
    if error.len() != n {
        return Err(GraphError::LengthMismatch { expected: n, got: error.len() });
    }
    let mut syndrome = vec![0u8; graph.side_checks(side)];
    for (b, &e) in error.iter().enumerate() {
        if e & 1 == 1 {
            for &c in graph.side_bit_neighbors(side, b) {
                syndrome[c] ^= 1;
            }
        }
    }
    Ok(syndrome)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipOutcome {
    pub correction: Vec<u8>,
    pub residual: Vec<u8>,
    /// Syndrome weight before each flip, followed by the final weight.
    pub weights: Vec<usize>,
}

/// Classical bit-flipping: repeatedly flips the lowest-index bit whose flip
/// strictly lowers the syndrome weight (primal code).
pub fn flip_decode(graph: &TannerGraph, syndrome: &[u8]) -> Result<FlipOutcome, GraphError> {
    if syndrome.len() != graph.n_checks() {
        return Err(GraphError::LengthMismatch { expected: graph.n_checks(), got: syndrome.len() });
    }
    let mut residual = syndrome.to_vec();
    let mut correction = vec![0u8; graph.n_bits()];
    let mut weight = residual.iter().filter(|&&s| s == 1).count();
    let mut weights = vec![weight];
    loop {
        let improver = (0..graph.n_bits()).find(|&b| {
            let unsat = graph.bit_neighbors(b).iter().filter(|&&c| residual[c] == 1).count();
            2 * unsat > graph.deg_bit()
        });
        let Some(b) = improver else { break };
        let unsat = graph.bit_neighbors(b).iter().filter(|&&c| residual[c] == 1).count();
        for &c in graph.bit_neighbors(b) {
            residual[c] ^= 1;
        }
        correction[b] ^= 1;
        weight = weight + graph.deg_bit() - 2 * unsat;
        weights.push(weight);
    }
    Ok(FlipOutcome { correction, residual, weights })
}
