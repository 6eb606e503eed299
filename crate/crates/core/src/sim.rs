//! Monte Carlo estimation of logical error rates.
//!
//! Trial `i` of a run seeded with `master` draws its error from a ChaCha8
//! stream selected by `(master, i)`, so results do not depend on how trials
//! are spread over threads. Trials run in fixed-size batches whose records
//! are folded in index order.

use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hgp::{quantum_syndrome, ErrorSupport, HgpCode, LocalView};
use crate::pal::DecodeOutcome;
use crate::pipeline::Decoder;
use crate::ssf::{best_flip_gray, best_flip_naive, ssf_decode, waterfall, SsfOptions};

/// 95% normal quantile.
pub const Z95: f64 = 1.96;
/// Trials per batch between adaptive stopping checks.
pub const BATCH: u64 = 1024;
/// Default failure target for adaptive runs.
pub const DEFAULT_MIN_FAILURES: u64 = 100;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("correction syndrome does not match the error syndrome")]
    SyndromeMismatch,
}

pub fn trial_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Each qubit independently with probability `p`.
pub fn sample_error(code: &HgpCode, p: f64, rng: &mut impl Rng) -> ErrorSupport {
    let qubits: Vec<usize> = (0..code.n_qubits()).filter(|_| rng.gen::<f64>() < p).collect();
    ErrorSupport::from_qubits(code, qubits).expect("indices in range")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    Success,
    LogicalFailure,
    HaltFailure,
}

impl TrialOutcome {
    pub fn is_failure(self) -> bool {
        self != Self::Success
    }
}

/// Halt if no correction; otherwise success iff `error Δ correction` is a
/// stabilizer.
pub fn classify(
    code: &HgpCode,
    error: &ErrorSupport,
    correction: Option<&ErrorSupport>,
) -> Result<TrialOutcome, SimError> {
    let Some(correction) = correction else {
        return Ok(TrialOutcome::HaltFailure);
    };
    let residual = error.symmetric_difference(correction);
    if !quantum_syndrome(code, &residual).is_zero() {
        return Err(SimError::SyndromeMismatch);
    }
    Ok(if code.is_stabilizer(&residual) { TrialOutcome::Success } else { TrialOutcome::LogicalFailure })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub seed: u64,
    pub error_weight: usize,
    pub outcome: TrialOutcome,
    pub ssf_iterations: usize,
    pub pal_iterations: usize,
    /// Minimum line cover of the SSF-stage stopping syndrome, if any.
    pub stopping_cover: Option<usize>,
    pub score_gen_calls: u64,
    pub waterfall_calls: u64,
    pub bposd_calls: u64,
    /// SSF syndrome weights strictly decreased.
    pub descent_ok: bool,
    /// A non-halt correction reproduced the input syndrome.
    pub valid: bool,
    /// Audited against the slow stabilizer test; `Some(agreed)`.
    pub audit: Option<bool>,
    pub elapsed_ns: u64,
}

fn run_trial(code: &HgpCode, decoder: &Decoder, p: f64, seed: u64, index: u64) -> TrialRecord {
    let mut rng = trial_rng(seed, index);
    let error = sample_error(code, p, &mut rng);
    let t0 = Instant::now();
    let syndrome = quantum_syndrome(code, &error);
    let out: DecodeOutcome = decoder.decode(code, &syndrome);
    let elapsed_ns = t0.elapsed().as_nanos() as u64;
    let valid = out.halted || quantum_syndrome(code, &out.correction) == syndrome;
    let outcome = if valid {
        classify(code, &error, (!out.halted).then_some(&out.correction)).expect("validity checked")
    } else {
        TrialOutcome::HaltFailure
    };
    let audit = (outcome == TrialOutcome::Success && index.is_multiple_of(100))
        .then(|| code.is_stabilizer_full_reduction(&error.symmetric_difference(&out.correction)));
    TrialRecord {
        index,
        seed,
        error_weight: error.weight(),
        outcome,
        ssf_iterations: out.ssf.iterations,
        pal_iterations: out.pal.as_ref().map_or(0, |t| t.iterations),
        stopping_cover: out.stopping_cover,
        score_gen_calls: out.ssf.score_gen_calls,
        waterfall_calls: out.ssf.waterfall_calls,
        bposd_calls: out.pal.as_ref().map_or(0, |t| t.bposd_calls),
        descent_ok: out.ssf.is_strictly_descending(),
        valid,
        audit,
        elapsed_ns,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TrialPolicy {
    Fixed(u64),
    /// Stop once `min_failures` are seen and the Wilson half-width is within
    /// one unit of the estimate's leading digit; give up after `max_trials`.
    Adaptive { min_failures: u64, max_trials: u64 },
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (k as f64, n as f64);
    let phat = k / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Unit of the leading significant digit of `x` (e.g. 0.043 → 0.01).
pub fn leading_digit_unit(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    10f64.powf(x.log10().floor())
}

/// Aggregates without timing, so equal seeds give equal values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepStats {
    pub code_n: usize,
    pub code_m: usize,
    pub graph_seed: u64,
    pub n_qubits: usize,
    pub p: f64,
    pub decoder: String,
    pub seed: u64,
    pub trials: u64,
    pub failures: u64,
    pub halt_failures: u64,
    pub logical_failures: u64,
    pub logical_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Stopping syndromes left by the SSF stage, by minimum line cover.
    pub cover1: u64,
    pub cover2: u64,
    pub cover3plus: u64,
    pub mean_ssf_iters: f64,
    pub mean_score_gen_calls: f64,
    pub mean_waterfall_calls: f64,
    pub descent_violations: u64,
    pub validity_violations: u64,
    pub audited: u64,
    pub audit_mismatches: u64,
    pub budget_exhausted: bool,
}

impl SweepStats {
    /// Halt failures as a fraction of all failures.
    pub fn halt_fraction(&self) -> f64 {
        if self.failures == 0 {
            0.0
        } else {
            self.halt_failures as f64 / self.failures as f64
        }
    }

    pub fn stopping_syndromes(&self) -> u64 {
        self.cover1 + self.cover2 + self.cover3plus
    }

    /// Fraction of SSF stopping syndromes that fit on one line.
    pub fn one_line_fraction(&self) -> f64 {
        let total = self.stopping_syndromes();
        if total == 0 {
            0.0
        } else {
            self.cover1 as f64 / total as f64
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTiming {
    pub mean_time_us: f64,
    pub total_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub stats: SweepStats,
    pub timing: SweepTiming,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<TrialRecord>>,
}

#[derive(Default)]
struct Tally {
    trials: u64,
    halt: u64,
    logical: u64,
    cover: [u64; 3],
    ssf_iters: u64,
    score_calls: u64,
    waterfall_calls: u64,
    descent_bad: u64,
    invalid: u64,
    audited: u64,
    audit_bad: u64,
    elapsed_ns: u128,
}

impl Tally {
    fn add(&mut self, r: &TrialRecord) {
        self.trials += 1;
        match r.outcome {
            TrialOutcome::HaltFailure => self.halt += 1,
            TrialOutcome::LogicalFailure => self.logical += 1,
            TrialOutcome::Success => {}
        }
        if let Some(c) = r.stopping_cover {
            self.cover[c.clamp(1, 3) - 1] += 1;
        }
        self.ssf_iters += r.ssf_iterations as u64;
        self.score_calls += r.score_gen_calls;
        self.waterfall_calls += r.waterfall_calls;
        self.descent_bad += u64::from(!r.descent_ok);
        self.invalid += u64::from(!r.valid);
        if let Some(ok) = r.audit {
            self.audited += 1;
            self.audit_bad += u64::from(!ok);
        }
        self.elapsed_ns += r.elapsed_ns as u128;
    }

    fn failures(&self) -> u64 {
        self.halt + self.logical
    }
}

/// Runs one `(code, decoder, p)` point.
pub fn run_point(
    code: &HgpCode,
    decoder: &Decoder,
    p: f64,
    policy: TrialPolicy,
    seed: u64,
    keep_records: bool,
) -> SweepResult {
    code.prepare();
    let start = Instant::now();
    let (target, min_failures) = match policy {
        TrialPolicy::Fixed(n) => (n, None),
        TrialPolicy::Adaptive { min_failures, max_trials } => (max_trials, Some(min_failures)),
    };
    let mut tally = Tally::default();
    let mut records = keep_records.then(Vec::new);
    let mut done = 0u64;
    let mut converged = min_failures.is_none();
    while done < target {
        let end = (done + BATCH).min(target);
        let batch: Vec<TrialRecord> =
            (done..end).into_par_iter().map(|i| run_trial(code, decoder, p, seed, i)).collect();
        for r in &batch {
            tally.add(r);
        }
        if let Some(r) = records.as_mut() {
            r.extend(batch);
        }
        done = end;
        if let Some(min_f) = min_failures {
            // With p = 0 nothing is random: one batch settles it.
            if p == 0.0 {
                converged = true;
                break;
            }
            let (lo, hi) = wilson(tally.failures(), tally.trials, Z95);
            let rate = tally.failures() as f64 / tally.trials as f64;
            if tally.failures() >= min_f && (hi - lo) / 2.0 <= leading_digit_unit(rate) {
                converged = true;
                break;
            }
        }
    }
    let failures = tally.failures();
    let n = tally.trials.max(1) as f64;
    let (ci_low, ci_high) = if p == 0.0 && failures == 0 { (0.0, 0.0) } else { wilson(failures, tally.trials, Z95) };
    let stats = SweepStats {
        code_n: code.n(),
        code_m: code.m(),
        graph_seed: code.graph().seed(),
        n_qubits: code.n_qubits(),
        p,
        decoder: decoder.spec.kind.name().to_string(),
        seed,
        trials: tally.trials,
        failures,
        halt_failures: tally.halt,
        logical_failures: tally.logical,
        logical_rate: failures as f64 / n,
        ci_low,
        ci_high,
        cover1: tally.cover[0],
        cover2: tally.cover[1],
        cover3plus: tally.cover[2],
        mean_ssf_iters: tally.ssf_iters as f64 / n,
        mean_score_gen_calls: tally.score_calls as f64 / n,
        mean_waterfall_calls: tally.waterfall_calls as f64 / n,
        descent_violations: tally.descent_bad,
        validity_violations: tally.invalid,
        audited: tally.audited,
        audit_mismatches: tally.audit_bad,
        budget_exhausted: !converged,
    };
    let timing = SweepTiming {
        mean_time_us: tally.elapsed_ns as f64 / n / 1e3,
        total_s: start.elapsed().as_secs_f64(),
    };
    SweepResult { stats, timing, records }
}

/// Runs every `p` in `p_list`; `decoder_for(p)` supplies the decoder (and
/// thereby its calibration) for each point.
pub fn run_sweep<E>(
    code: &HgpCode,
    p_list: &[f64],
    policy: TrialPolicy,
    seed: u64,
    keep_records: bool,
    mut decoder_for: impl FnMut(f64) -> Result<Decoder, E>,
) -> Result<Vec<SweepResult>, E> {
    p_list
        .iter()
        .map(|&p| Ok(run_point(code, &decoder_for(p)?, p, policy, seed, keep_records)))
        .collect()
}

#[derive(Serialize)]
struct CsvRow<'a> {
    code_n: usize,
    code_m: usize,
    graph_seed: u64,
    #[serde(rename = "N")]
    n_qubits: usize,
    p: f64,
    decoder: &'a str,
    trials: u64,
    failures: u64,
    halt_failures: u64,
    logical_rate: f64,
    ci_low: f64,
    ci_high: f64,
    cover1: u64,
    cover2: u64,
    cover3plus: u64,
    mean_ssf_iters: f64,
    mean_time_us: f64,
    seed: u64,
}

/// One row per sweep point; `seed` is appended after the standard columns.
pub fn write_csv(out: impl Write, results: &[SweepResult]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        let s = &r.stats;
        w.serialize(CsvRow {
            code_n: s.code_n,
            code_m: s.code_m,
            graph_seed: s.graph_seed,
            n_qubits: s.n_qubits,
            p: s.p,
            decoder: &s.decoder,
            trials: s.trials,
            failures: s.failures,
            halt_failures: s.halt_failures,
            logical_rate: s.logical_rate,
            ci_low: s.ci_low,
            ci_high: s.ci_high,
            cover1: s.cover1,
            cover2: s.cover2,
            cover3plus: s.cover3plus,
            mean_ssf_iters: s.mean_ssf_iters,
            mean_time_us: r.timing.mean_time_us,
            seed: s.seed,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantProfile {
    pub variant: String,
    pub mean_score_gen_calls: f64,
    pub mean_waterfall_calls: f64,
    /// Share of scoring requests answered by the fast path.
    pub fast_path_fraction: f64,
    /// Mean time of one exhaustive scorer call on the captured views.
    pub per_call_ns: f64,
    pub per_trial_us: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub n_qubits: usize,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub identical_outcomes: bool,
    /// Mean per-call time of the naive scorer over the Gray scorer.
    pub naive_over_gray: f64,
    pub waterfall_per_call_ns: f64,
    pub variants: Vec<VariantProfile>,
}

fn time_scorer(views: &[LocalView], reps: usize, f: impl Fn(&LocalView) -> u32) -> f64 {
    if views.is_empty() {
        return 0.0;
    }
    // Warm-up pass, excluded from the measurement.
    let mut sink = 0u32;
    for v in views {
        sink = sink.wrapping_add(f(black_box(v)));
    }
    let t0 = Instant::now();
    for _ in 0..reps {
        for v in views {
            sink = sink.wrapping_add(f(black_box(v)));
        }
    }
    black_box(sink);
    t0.elapsed().as_nanos() as f64 / (reps * views.len()) as f64
}

/// Decodes the same seeded errors with four SSF variants (naive, gray,
/// gray+skip, gray+skip+waterfall), checks that they make identical flips,
/// and measures scorer costs. Runs serially for stable timings.
pub fn profile_ssf_variants(code: &HgpCode, p: f64, trials: u64, seed: u64) -> ProfileReport {
    let variants = [
        ("naive", SsfOptions::naive()),
        ("gray", SsfOptions::gray()),
        ("gray+skip", SsfOptions::gray_skip()),
        ("gray+skip+waterfall", SsfOptions::gray_skip_waterfall()),
    ];
    let syndromes: Vec<_> = (0..trials)
        .map(|i| quantum_syndrome(code, &sample_error(code, p, &mut trial_rng(seed, i))))
        .collect();

    let mut identical = true;
    let mut reference = Vec::new();
    let mut captured: Vec<LocalView> = Vec::new();
    let mut light: Vec<LocalView> = Vec::new();
    let mut rows = Vec::new();
    for (k, (name, opts)) in variants.iter().enumerate() {
        let opts = SsfOptions { audit: false, capture_views: *name == "gray+skip", ..*opts };
        let (mut calls, mut wf) = (0u64, 0u64);
        let t0 = Instant::now();
        for (i, s) in syndromes.iter().enumerate() {
            let out = ssf_decode(code, s, &opts);
            calls += out.trace.score_gen_calls;
            wf += out.trace.waterfall_calls;
            if k == 0 {
                reference.push((out.correction.clone(), out.trace.flips.clone()));
            } else if reference[i] != (out.correction.clone(), out.trace.flips.clone()) {
                identical = false;
            }
            if opts.capture_views {
                captured.extend(out.trace.views);
            }
        }
        let per_trial_us = t0.elapsed().as_secs_f64() * 1e6 / trials.max(1) as f64;
        let n = trials.max(1) as f64;
        rows.push(VariantProfile {
            variant: name.to_string(),
            mean_score_gen_calls: calls as f64 / n,
            mean_waterfall_calls: wf as f64 / n,
            fast_path_fraction: if calls + wf == 0 { 0.0 } else { wf as f64 / (calls + wf) as f64 },
            per_call_ns: 0.0,
            per_trial_us,
        });
    }
    light.extend(captured.iter().filter(|v| crate::ssf::waterfall_eligible(v)).copied());

    let sample: Vec<LocalView> = captured.iter().copied().take(20_000).collect();
    let reps = (200_000 / sample.len().max(1)).max(1);
    let gray_ns = time_scorer(&sample, reps, |v| best_flip_gray(v).flip.rows);
    let naive_ns = time_scorer(&sample, reps.div_ceil(8), |v| best_flip_naive(v).flip.rows);
    let wf_sample: Vec<LocalView> = light.into_iter().take(20_000).collect();
    let wf_reps = (200_000 / wf_sample.len().max(1)).max(1);
    let wf_ns = time_scorer(&wf_sample, wf_reps, |v| waterfall(v).map_or(0, |b| b.flip.rows));
    rows[0].per_call_ns = naive_ns;
    for r in &mut rows[1..] {
        r.per_call_ns = gray_ns;
    }
    ProfileReport {
        n_qubits: code.n_qubits(),
        p,
        trials,
        seed,
        identical_outcomes: identical,
        naive_over_gray: if gray_ns > 0.0 { naive_ns / gray_ns } else { 0.0 },
        waterfall_per_call_ns: wf_ns,
        variants: rows,
    }
}

#[derive(Serialize)]
struct ProfileRow<'a> {
    #[serde(rename = "N")]
    n_qubits: usize,
    p: f64,
    trials: u64,
    variant: &'a str,
    mean_score_gen_calls: f64,
    mean_waterfall_calls: f64,
    fast_path_fraction: f64,
    per_call_ns: f64,
    per_trial_us: f64,
    identical_outcomes: bool,
    seed: u64,
}

pub fn write_profile_csv(out: impl Write, report: &ProfileReport) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for v in &report.variants {
        w.serialize(ProfileRow {
            n_qubits: report.n_qubits,
            p: report.p,
            trials: report.trials,
            variant: &v.variant,
            mean_score_gen_calls: v.mean_score_gen_calls,
            mean_waterfall_calls: v.mean_waterfall_calls,
            fast_path_fraction: v.fast_path_fraction,
            per_call_ns: v.per_call_ns,
            per_trial_us: v.per_trial_us,
            identical_outcomes: report.identical_outcomes,
            seed: report.seed,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{DecoderKind, DecoderSpec};
    use crate::tanner::peg_construct;

    fn code(n: usize, m: usize) -> HgpCode {
        HgpCode::new(peg_construct(n, m, 3, 4, 7).unwrap()).unwrap()
    }

    #[test]
    fn sampling_extremes_and_mean() {
        let c = code(48, 36);
        let mut rng = trial_rng(1, 0);
        assert!(sample_error(&c, 0.0, &mut rng).is_empty());
        assert_eq!(sample_error(&c, 1.0, &mut rng).weight(), 3600);
        let total: usize = (0..2000).map(|i| sample_error(&c, 0.01, &mut trial_rng(5, i)).weight()).sum();
        let mean = total as f64 / 2000.0;
        let se = (3600.0 * 0.01 * 0.99 / 2000.0f64).sqrt();
        assert!((mean - 36.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn streams_are_independent_of_order() {
        let c = code(24, 18);
        let a = sample_error(&c, 0.05, &mut trial_rng(3, 17));
        let _ = sample_error(&c, 0.05, &mut trial_rng(3, 16));
        assert_eq!(a, sample_error(&c, 0.05, &mut trial_rng(3, 17)));
        assert_ne!(a, sample_error(&c, 0.05, &mut trial_rng(3, 18)));
    }

    #[test]
    fn classify_cases() {
        let c = code(4, 3);
        let e = ErrorSupport::from_qubits(&c, [0, 7]).unwrap();
        assert_eq!(classify(&c, &e, Some(&e)), Ok(TrialOutcome::Success));
        let stab = ErrorSupport::from_qubits(&c, c.generator_support(2)).unwrap();
        assert_eq!(classify(&c, &e, Some(&e.symmetric_difference(&stab))), Ok(TrialOutcome::Success));
        assert_eq!(classify(&c, &e, None), Ok(TrialOutcome::HaltFailure));
        let wrong = ErrorSupport::from_qubits(&c, [0]).unwrap();
        assert_eq!(classify(&c, &e, Some(&wrong)), Err(SimError::SyndromeMismatch));
        // A logical on K(4,3): two VV qubits in one row sharing every check.
        let logical = ErrorSupport::from_qubits(&c, [c.vv(0, 0), c.vv(0, 1)]).unwrap();
        assert_eq!(classify(&c, &e, Some(&e.symmetric_difference(&logical))), Ok(TrialOutcome::LogicalFailure));
    }

    #[test]
    fn wilson_properties() {
        let (lo, hi) = wilson(0, 100, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson(50, 100, Z95);
        assert!(lo < 0.5 && hi > 0.5);
        assert!(((hi - lo) / 2.0 - 0.098).abs() < 0.002);
        assert_eq!(leading_digit_unit(0.043), 0.01);
        assert_eq!(leading_digit_unit(4e-4), 1e-4);
    }

    #[test]
    fn zero_rate_point() {
        let c = code(24, 18);
        let d = Decoder::new(DecoderSpec::new(DecoderKind::Ssf), &c, 0.0, None).unwrap();
        let r = run_point(&c, &d, 0.0, TrialPolicy::Adaptive { min_failures: 100, max_trials: 10_000 }, 1, false);
        assert_eq!(r.stats.failures, 0);
        assert_eq!((r.stats.ci_low, r.stats.ci_high), (0.0, 0.0));
        assert!(!r.stats.budget_exhausted);
    }

    #[test]
    fn sweeps_are_reproducible() {
        let c = code(24, 18);
        let d = Decoder::new(DecoderSpec::new(DecoderKind::Ssf), &c, 0.03, None).unwrap();
        let a = run_point(&c, &d, 0.03, TrialPolicy::Fixed(300), 42, true);
        let b = run_point(&c, &d, 0.03, TrialPolicy::Fixed(300), 42, true);
        assert_eq!(a.stats, b.stats);
        assert!(a.stats.ci_low <= a.stats.logical_rate && a.stats.logical_rate <= a.stats.ci_high);
        assert_eq!(a.stats.descent_violations, 0);
        assert_eq!(a.stats.validity_violations, 0);
        assert_eq!(a.stats.audit_mismatches, 0);
        assert_eq!(a.stats.stopping_syndromes(), a.stats.halt_failures);
        let strip = |r: &SweepResult| {
            r.records.as_ref().unwrap().iter().map(|t| TrialRecord { elapsed_ns: 0, ..t.clone() }).collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
        let mut buf = Vec::new();
        write_csv(&mut buf, &[a]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("code_n,code_m,graph_seed,N,p,decoder,trials,failures,halt_failures,logical_rate,ci_low,ci_high,cover1,cover2,cover3plus,mean_ssf_iters,mean_time_us"));
    }

    #[test]
    fn profile_variants_agree() {
        let c = code(24, 18);
        let r = profile_ssf_variants(&c, 0.02, 30, 3);
        assert!(r.identical_outcomes);
        assert_eq!(r.variants.len(), 4);
        assert!(r.variants[2].mean_score_gen_calls <= r.variants[1].mean_score_gen_calls);
    }
}
