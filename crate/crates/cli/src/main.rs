//! `hgp`: code generation, line calibration, single decodes, Monte Carlo
//! sweeps and SSF variant profiling.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hgp_core::hgp::{is_logical_failure, quantum_syndrome};
use hgp_core::pal::{calibrate, LineCalibration};
use hgp_core::pipeline::HardDecision;
use hgp_core::sim::{profile_ssf_variants, run_point, write_csv, write_profile_csv, SweepResult, TrialPolicy};
use hgp_core::{peg_construct, Decoder, DecoderKind, DecoderSpec, ErrorSupport, HgpCode, Syndrome, TannerGraph};
use serde_json::json;

const EXIT_USAGE: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_CHECK: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "hgp", version, about = "Hypergraph product codes with SSF and PAL decoding")]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "HGP_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a Tanner graph and report the HGP code it defines.
    Gen(GenArgs),
    /// Estimate the per-line priors PAL hands to BP+OSD.
    Calibrate(CalibrateArgs),
    /// Decode a single syndrome (or the syndrome of an error) from a file.
    Decode(DecodeArgs),
    /// Logical error rates over a grid of p values and decoders.
    Sweep(SweepArgs),
    /// Compare the four SSF scorer variants on identical errors.
    Profile(ProfileArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 3)]
    dv: usize,
    #[arg(long, default_value_t = 4)]
    dc: usize,
    /// Graph seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the graph as an edge list.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the X-check matrix, one row of qubit indices per line.
    #[arg(long)]
    x_checks: Option<PathBuf>,
    /// Write the summary as JSON.
    #[arg(long)]
    summary: Option<PathBuf>,
}

/// Either a graph file or PEG parameters.
#[derive(Args, Debug)]
struct GraphSource {
    /// Edge-list graph file written by `gen`.
    #[arg(long, conflicts_with_all = ["n", "m"])]
    graph: Option<PathBuf>,
    #[arg(long, requires = "m")]
    n: Option<usize>,
    #[arg(long, requires = "n")]
    m: Option<usize>,
    #[arg(long, default_value_t = 3)]
    dv: usize,
    #[arg(long, default_value_t = 4)]
    dc: usize,
    #[arg(long, default_value_t = 0)]
    graph_seed: u64,
}

impl GraphSource {
    fn check(&self) -> Result<()> {
        if self.graph.is_none() && self.n.is_none() {
            return Err(usage("give either --graph FILE or --n and --m"));
        }
        if let (Some(n), Some(m)) = (self.n, self.m) {
            check_degrees(n, m, self.dv, self.dc)?;
        }
        Ok(())
    }

    fn load(&self) -> Result<HgpCode> {
        let graph = match (&self.graph, self.n, self.m) {
            (Some(path), _, _) => {
                TannerGraph::load(path).with_context(|| format!("reading graph {}", path.display()))?
            }
            (None, Some(n), Some(m)) => peg_construct(n, m, self.dv, self.dc, self.graph_seed)?,
            _ => unreachable!("checked by GraphSource::check"),
        };
        Ok(HgpCode::new(graph)?)
    }
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 4000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; defaults to the sidecar name inside --cal-dir.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    cal_dir: PathBuf,
}

#[derive(Args, Debug)]
struct DecoderArgs {
    /// ssf, ssf+pal, bp+ssf or bp+ssf+pal.
    #[arg(long, default_value = "ssf")]
    decoder: String,
    /// BP rounds before SSF.
    #[arg(long = "R", default_value_t = 30)]
    rounds: usize,
    #[arg(long, default_value_t = 20)]
    pal_iters: usize,
    /// Put a qubit into the BP estimate when its posterior is positive
    /// instead of non-positive.
    #[arg(long)]
    bp_positive: bool,
}

impl DecoderArgs {
    fn specs(&self) -> Result<Vec<DecoderSpec>> {
        self.decoder
            .split(',')
            .map(|name| {
                let kind: DecoderKind = name.parse().map_err(|e| usage(format!("{e}")))?;
                let spec = DecoderSpec {
                    bp_rounds: self.rounds,
                    pal_iters: self.pal_iters,
                    hard_decision: if self.bp_positive { HardDecision::Positive } else { HardDecision::NonPositive },
                    ..DecoderSpec::new(kind)
                };
                spec.validate().map_err(|e| usage(format!("{e}")))?;
                Ok(spec)
            })
            .collect()
    }
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    decoder: DecoderArgs,
    /// File of unsatisfied X-check indices.
    #[arg(long, conflicts_with = "error", required_unless_present = "error")]
    syndrome: Option<PathBuf>,
    /// File of flipped qubit indices; decodes its syndrome and reports
    /// whether the result is a logical failure.
    #[arg(long)]
    error: Option<PathBuf>,
    /// Physical error rate for the BP prior.
    #[arg(long, default_value_t = 0.01)]
    p: f64,
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Echoed into the output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Comma-separated physical error rates.
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    /// Fixed number of trials per point; otherwise stop adaptively.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 100)]
    min_failures: u64,
    #[arg(long, default_value_t = 10_000_000)]
    max_trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory holding calibration sidecars.
    #[arg(long, default_value = ".")]
    cal_dir: PathBuf,
    /// Calibrate missing sidecars with this many samples instead of failing.
    #[arg(long)]
    calibrate_samples: Option<usize>,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON mirror of the statistics.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Include every trial record in the JSON mirror.
    #[arg(long, requires = "json")]
    dump_trials: bool,
    /// Exit with status 3 on any descent, validity or audit violation, or
    /// when a point exhausts its trial budget.
    #[arg(long)]
    check: bool,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, default_value_t = 0.01)]
    p: f64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Exit with status 3 unless outcomes agree, Gray is at least 5x faster
    /// per call than naive, skipping reduces scorer calls, and Waterfall
    /// handles at least 90% of scoring.
    #[arg(long)]
    check: bool,
}

/// Invalid input detected after parsing.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    CheckFailed(Vec<String>),
}

fn sidecar_path(dir: &Path, graph_seed: u64, p: f64) -> PathBuf {
    dir.join(format!("calibration_g{graph_seed}_p{p}.json"))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_indices(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or_default();
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            out.push(tok.parse().map_err(|_| usage(format!("{}:{}: bad index {tok:?}", path.display(), k + 1)))?);
        }
    }
    Ok(out)
}

fn check_degrees(n: usize, m: usize, dv: usize, dc: usize) -> Result<()> {
    if n * dv != m * dc {
        return Err(usage(format!("edge counts differ: {n}·{dv} != {m}·{dc}")));
    }
    Ok(())
}

fn check_rate(p: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero { (0.0..1.0).contains(&p) } else { p > 0.0 && p < 1.0 };
    if !ok {
        let range = if allow_zero { "[0, 1)" } else { "(0, 1)" };
        return Err(usage(format!("p = {p} is outside {range}")));
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<Status> {
    check_degrees(args.n, args.m, args.dv, args.dc)?;
    let graph = peg_construct(args.n, args.m, args.dv, args.dc, args.seed)?;
    let code = HgpCode::new(graph)?;
    let g = code.graph();
    let summary = json!({
        "n_bits": g.n_bits(),
        "n_checks": g.n_checks(),
        "deg_bit": g.deg_bit(),
        "deg_check": g.deg_check(),
        "seed": args.seed,
        "girth": g.girth(),
        "N": code.n_qubits(),
        "M_X": code.n_checks(),
        "M_Z": code.n_generators(),
        "K": code.logical_dimension(),
    });
    println!(
        "N={} M_X={} M_Z={} K={} girth={} seed={}",
        code.n_qubits(),
        code.n_checks(),
        code.n_generators(),
        code.logical_dimension(),
        g.girth().map_or("inf".to_string(), |x| x.to_string()),
        args.seed,
    );
    if let Some(path) = &args.out {
        g.save(path)?;
    }
    if let Some(path) = &args.x_checks {
        fs::write(path, code.x_checks_text())?;
    }
    if let Some(path) = &args.summary {
        fs::write(path, serde_json::to_string_pretty(&summary)? + "\n")?;
    }
    Ok(Status::Ok)
}

fn cmd_calibrate(args: &CalibrateArgs) -> Result<Status> {
    args.source.check()?;
    check_rate(args.p, false)?;
    if args.samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let code = args.source.load()?;
    let cal = calibrate(&code, args.p, args.samples, args.seed)?;
    if cal.fallback {
        eprintln!("warning: too few stopped lines; falling back to q = p on at least one side");
    }
    let path = args.out.clone().unwrap_or_else(|| sidecar_path(&args.cal_dir, code.graph().seed(), args.p));
    cal.save(&path)?;
    println!("q_v={} q_c={} -> {}", cal.q_v, cal.q_c, path.display());
    Ok(Status::Ok)
}

fn cmd_decode(args: &DecodeArgs) -> Result<Status> {
    args.source.check()?;
    let specs = args.decoder.specs()?;
    let [spec] = specs[..] else {
        return Err(usage("decode takes exactly one decoder"));
    };
    check_rate(args.p, !spec.kind.uses_bp())?;
    let code = args.source.load()?;
    let calibration = match &args.calibration {
        Some(path) => Some(LineCalibration::load(path).with_context(|| format!("reading {}", path.display()))?),
        None => None,
    };
    let error = match &args.error {
        Some(path) => Some(ErrorSupport::from_qubits(&code, read_indices(path)?).map_err(|e| usage(e.to_string()))?),
        None => None,
    };
    let syndrome = match (&error, &args.syndrome) {
        (Some(e), _) => quantum_syndrome(&code, e),
        (None, Some(path)) => Syndrome::from_checks(&code, read_indices(path)?).map_err(|e| usage(e.to_string()))?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    let decoder = Decoder::new(spec, &code, args.p, calibration.as_ref())?;
    let out = decoder.decode(&code, &syndrome);
    let logical_failure = match &error {
        Some(e) if !out.halted => Some(is_logical_failure(&code, &e.symmetric_difference(&out.correction))?),
        _ => None,
    };
    let report = json!({
        "decoder": spec.kind.name(),
        "seed": args.seed,
        "p": args.p,
        "syndrome_weight": syndrome.weight(),
        "halted": out.halted,
        "correction": out.correction.sorted(),
        "residual": out.residual.sorted_checks(),
        "ssf_iterations": out.ssf.iterations,
        "ssf_residual_weight": out.ssf_residual_weight,
        "stopping_cover": out.stopping_cover,
        "pal_iterations": out.pal.as_ref().map(|t| t.iterations),
        "logical_failure": logical_failure,
    });
    write_output(args.out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok(Status::Ok)
}

fn cmd_sweep(args: &SweepArgs) -> Result<Status> {
    args.source.check()?;
    let specs = args.decoder.specs()?;
    for &p in &args.p {
        let bp = specs.iter().any(|s| s.kind.uses_bp());
        check_rate(p, !bp)?;
    }
    if args.trials == Some(0) || args.max_trials == 0 {
        return Err(usage("trial counts must be positive"));
    }
    if args.calibrate_samples == Some(0) {
        return Err(usage("--calibrate-samples must be positive"));
    }
    let policy = match args.trials {
        Some(n) => TrialPolicy::Fixed(n),
        None => TrialPolicy::Adaptive { min_failures: args.min_failures, max_trials: args.max_trials },
    };
    let code = args.source.load()?;
    let graph_seed = code.graph().seed();

    // Resolve every calibration before simulating anything.
    let mut calibrations: Vec<Option<LineCalibration>> = Vec::new();
    let needs_pal = specs.iter().any(|s| s.kind.uses_pal());
    for &p in &args.p {
        if !needs_pal {
            calibrations.push(None);
            continue;
        }
        if p == 0.0 {
            // No errors are ever sampled, so any prior gives the same result.
            calibrations.push(Some(LineCalibration::fallback(graph_seed, p)));
            continue;
        }
        let path = sidecar_path(&args.cal_dir, graph_seed, p);
        let cal = if path.exists() {
            LineCalibration::load(&path).with_context(|| format!("reading {}", path.display()))?
        } else if let Some(samples) = args.calibrate_samples {
            let cal = calibrate(&code, p, samples, args.seed)?;
            cal.save(&path)?;
            cal
        } else {
            bail!("no calibration for p = {p} at {} (run `hgp calibrate` or pass --calibrate-samples)", path.display());
        };
        calibrations.push(Some(cal));
    }

    let mut results: Vec<SweepResult> = Vec::new();
    for (&p, cal) in args.p.iter().zip(&calibrations) {
        for spec in &specs {
            let decoder = Decoder::new(*spec, &code, p, cal.as_ref())?;
            let r = run_point(&code, &decoder, p, policy, args.seed, args.dump_trials);
            eprintln!(
                "{} p={} trials={} failures={} rate={:.4e}",
                r.stats.decoder, p, r.stats.trials, r.stats.failures, r.stats.logical_rate
            );
            results.push(r);
        }
    }

    let mut csv = Vec::new();
    write_csv(&mut csv, &results)?;
    write_output(args.out.as_deref(), std::str::from_utf8(&csv)?)?;
    if let Some(path) = &args.json {
        let mut doc = json!({ "seed": args.seed, "points": results });
        if !args.dump_trials {
            for point in doc["points"].as_array_mut().into_iter().flatten() {
                point.as_object_mut().map(|o| o.remove("records"));
            }
        }
        fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    }

    if !args.check {
        return Ok(Status::Ok);
    }
    let mut problems = Vec::new();
    for r in &results {
        let s = &r.stats;
        let tag = format!("{} p={}", s.decoder, s.p);
        if s.descent_violations > 0 {
            problems.push(format!("{tag}: {} descent violations", s.descent_violations));
        }
        if s.validity_violations > 0 {
            problems.push(format!("{tag}: {} validity violations", s.validity_violations));
        }
        if s.audit_mismatches > 0 {
            problems.push(format!("{tag}: {} audit mismatches", s.audit_mismatches));
        }
        if s.budget_exhausted {
            problems.push(format!("{tag}: trial budget exhausted before the stopping rule was met"));
        }
    }
    Ok(if problems.is_empty() { Status::Ok } else { Status::CheckFailed(problems) })
}

fn cmd_profile(args: &ProfileArgs) -> Result<Status> {
    args.source.check()?;
    check_rate(args.p, false)?;
    if args.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let code = args.source.load()?;
    if !code.is_34() {
        bail!("the Waterfall variant needs a (3,4) code, got ({},{})", code.deg_bit(), code.deg_check());
    }
    let report = profile_ssf_variants(&code, args.p, args.trials, args.seed);
    let mut csv = Vec::new();
    write_profile_csv(&mut csv, &report)?;
    write_output(args.out.as_deref(), std::str::from_utf8(&csv)?)?;
    if let Some(path) = &args.json {
        fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    if !args.check {
        return Ok(Status::Ok);
    }
    let find = |name: &str| report.variants.iter().find(|v| v.variant == name);
    let mut problems = Vec::new();
    if !report.identical_outcomes {
        problems.push("variants disagree on some outcome".to_string());
    }
    if report.naive_over_gray < 5.0 {
        problems.push(format!("naive/gray per-call ratio {:.2} < 5", report.naive_over_gray));
    }
    if let (Some(gray), Some(skip)) = (find("gray"), find("gray+skip")) {
        if skip.mean_score_gen_calls >= gray.mean_score_gen_calls {
            problems.push("generator skipping does not reduce scorer calls".to_string());
        }
    }
    if let Some(wf) = find("gray+skip+waterfall") {
        if wf.fast_path_fraction < 0.9 {
            problems.push(format!("waterfall fast-path fraction {:.3} < 0.9", wf.fast_path_fraction));
        }
    }
    Ok(if problems.is_empty() { Status::Ok } else { Status::CheckFailed(problems) })
}

fn run(cli: &Cli) -> Result<Status> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Profile(a) => cmd_profile(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed(problems)) => {
            for p in problems {
                eprintln!("check failed: {p}");
            }
            ExitCode::from(EXIT_CHECK)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_RUNTIME)
            }
        }
    }
}
