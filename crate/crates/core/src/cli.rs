//! The `basketmit` command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::calibrate::calibrate;
use crate::estimate::{
    minimize_eps_given_n_warm, minimize_n_given_eps, BoundInputs, EstimationResult, TracePoint, DEFAULT_N_CEILING,
};
use crate::io::{self, Experiment, FileDigest, RunManifest, OUT_DIR_ENV};
use crate::mitigate::{
    analyse_repetition, drive_protocol, make_schedule, plan, run_schedule, schedule_rng, Plan, Posterior,
    ProtocolOutcome, ProtocolParams, ProtocolStatus, ReplaySource, RepetitionReport, SimulationSource,
};
use crate::noise::{default_base_model, NoiseSchedule, DEFAULT_EXPERIMENT_GAIN};
use crate::pattern::oracle::{all_inputs, deterministic_output, exact_output_distribution};
use crate::pattern::{cnot15, cnot_truth_table, MeasurementPattern, PatternFile, CNOT15_DECISION_ACCEPT};
use crate::report::{phi_svg, write_phi_csv, Series};
use crate::rounds::{
    run_computation_round, ComputationRoundSpec, DecisionMap, ExecOrder, RoundKind, RoundTranscript, TestRoundSpec,
    Verdict,
};
use crate::sim::NoiseModel;

const EXIT_ERROR: u8 = 1;
const EXIT_ABORT: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "basketmit", version, about = "Verification-based error mitigation by basketing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimise the local-correctness bound.
    Estimate(EstimateArgs),
    /// Simulate an experiment's rounds and store the transcripts.
    Run(RunArgs),
    /// Analyse stored transcripts: baskets, certification, verdict.
    Mitigate(MitigateArgs),
    /// Windowed failure-rate CSV and SVG plot of stored transcripts.
    Report(ReportArgs),
    /// Compare noiseless blinded execution with the statevector semantics.
    Oracle(OracleArgs),
    /// Run the built-in CNOT experiment and compare with reference values.
    ReproducePaper(ReproduceArgs),
    /// Fit the scale of a base noise model to a target failure rate.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[arg(long)]
    pub pmax: f64,
    /// Minimise ε_max at this n.
    #[arg(long, conflicts_with = "eps", required_unless_present = "eps")]
    pub n: Option<u64>,
    /// Find the smallest n with ε_max ≤ eps.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Fix τ instead of optimising it.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_N_CEILING)]
    pub ceiling: u64,
    /// Write every evaluated point (at the final n) to this JSON file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output directory [default: config's output_dir, then $BASKETMIT_OUT, then ./out]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Repetitions of N′ rounds to simulate.
    #[arg(long, default_value_t = 1)]
    pub repetitions: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct MitigateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub transcripts: PathBuf,
    /// Refuse to run if any file digest in this manifest is stale.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub transcripts: PathBuf,
    /// Take window, p̃, N, N′ and groups from this experiment.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub window: usize,
    #[arg(long, default_value_t = 0.15)]
    pub p_tilde: f64,
    /// Basket scale N; runs of at least N/2 rounds are shaded.
    #[arg(long, default_value_t = 10_000)]
    pub n: u64,
    /// Rounds per repetition [default: the whole stream].
    #[arg(long)]
    pub n_prime: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub groups: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Pattern file [default: the built-in 15-vertex CNOT].
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    /// Blinded runs per input.
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// Also check the truth table against a known gate.
    #[arg(long, value_parser = ["cnot"])]
    pub expect: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Experiment whose pattern, colouring, gain and base model (as the shape) are used.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 0.165)]
    pub target: f64,
    #[arg(long, default_value_t = 0.9)]
    pub level: f64,
    #[arg(long, default_value_t = 20_000)]
    pub rounds: usize,
    #[arg(long, default_value_t = 20)]
    pub iterations: usize,
    /// Write the calibrated noise model here.
    #[arg(long)]
    pub write: Option<PathBuf>,
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", json!({"status": "error", "message": format!("{e:#}")}));
            ExitCode::from(EXIT_ERROR)
        }
    }
}

/// Runs one command; `Ok` carries 0 (success) or 2 (abort).
pub fn run(command: Command) -> Result<u8> {
    match command {
        Command::Estimate(a) => cmd_estimate(&a),
        Command::Run(a) => cmd_run(&a),
        Command::Mitigate(a) => cmd_mitigate(&a),
        Command::Report(a) => cmd_report(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::ReproducePaper(a) => cmd_reproduce_paper(&a),
        Command::Calibrate(a) => cmd_calibrate(&a),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn out_dir(flag: &OutArgs, config: Option<&Path>) -> Result<PathBuf> {
    let dir = io::output_dir(flag.out.as_deref(), config);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn cmd_estimate(a: &EstimateArgs) -> Result<u8> {
    let inputs = BoundInputs::new(a.k, a.p, a.pmax, a.tau);
    let res = match (a.n, a.eps) {
        (Some(n), _) => {
            let mut trace = Vec::new();
            let r = minimize_eps_given_n_warm(&inputs, n, &[], a.trace.as_ref().map(|_| &mut trace));
            write_trace(a.trace.as_deref(), &trace)?;
            r
        }
        (None, Some(eps)) => {
            let r = minimize_n_given_eps(&inputs, eps, a.ceiling);
            if let (Some(path), Some(e)) = (&a.trace, r.done()) {
                let mut trace = Vec::new();
                minimize_eps_given_n_warm(&inputs, e.n, &[e.params], Some(&mut trace));
                write_trace(Some(path), &trace)?;
            }
            r
        }
        (None, None) => bail!("one of --n or --eps is required"),
    };
    let mut value = serde_json::to_value(&res)?;
    match &res {
        EstimationResult::Done(e) => eprintln!("n = {}, ε_max = {:.6}, τ = {:.4}, Φ = {:.6}", e.n, e.eps_max, e.tau, e.phi),
        EstimationResult::Abort { reason, .. } => {
            eprintln!("abort: {reason}");
            value["message"] = json!(reason.to_string());
        }
    }
    print_json(&value)?;
    Ok(if res.is_done() { 0 } else { EXIT_ABORT })
}

fn write_trace(path: Option<&Path>, trace: &[TracePoint]) -> Result<()> {
    if let Some(p) = path {
        io::write_json(p, &trace)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct RunSummary {
    rounds: usize,
    tests: usize,
    test_pass_rate: f64,
    computations: usize,
    decision_one_fraction: f64,
    discarded: usize,
    transcripts: PathBuf,
    sha256: String,
}

fn summarise(ts: &[RoundTranscript], path: &Path, sha256: String) -> RunSummary {
    let tests = ts.iter().filter(|t| t.kind == RoundKind::Test).count();
    let passed = ts.iter().filter(|t| t.verdict == Verdict::Pass).count();
    let comps = ts.len() - tests;
    let ones = ts.iter().filter(|t| t.verdict == Verdict::Decision(1)).count();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    RunSummary {
        rounds: ts.len(),
        tests,
        test_pass_rate: ratio(passed, tests),
        computations: comps,
        decision_one_fraction: ratio(ones, comps),
        discarded: ts.iter().filter(|t| t.verdict == Verdict::Discarded).count(),
        transcripts: path.to_path_buf(),
        sha256,
    }
}

fn abort_json(detail: impl Serialize) -> serde_json::Value {
    json!({"status": "abort", "abort": detail})
}

fn cmd_run(a: &RunArgs) -> Result<u8> {
    let exp = Experiment::load(&a.config)?;
    let params = &exp.config.protocol;
    let plan = match plan(params, exp.colouring.k()) {
        Ok(p) => p,
        Err(reason) => {
            print_json(&abort_json(json!({"reason": "estimation-infeasible", "detail": reason})))?;
            return Ok(EXIT_ABORT);
        }
    };
    let setup = exp.setup();
    let mut all = Vec::with_capacity(params.n_prime * a.repetitions);
    for rep in 0..a.repetitions {
        let schedule = make_schedule(params.n_prime, plan.tau, params.groups, 1, &mut schedule_rng(setup.master_seed, rep))?;
        all.extend(run_schedule(&schedule, &setup, (rep * params.n_prime) as u64)?);
    }
    let dir = out_dir(&a.out, exp.config.output_dir.as_deref())?;
    let path = dir.join("transcripts.jsonl");
    let sha256 = io::write_transcripts(&path, &all)?;
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: exp.config.clone(),
        seed: exp.config.seed,
        repetitions: a.repetitions,
        inputs: exp.inputs.clone(),
        transcripts: FileDigest {
            path: path.clone(),
            sha256: sha256.clone(),
        },
    };
    io::write_json(&dir.join("manifest.json"), &manifest)?;
    let summary = summarise(&all, &path, sha256);
    eprintln!(
        "{} rounds, test pass rate {:.3}, {} computations",
        summary.rounds, summary.test_pass_rate, summary.computations
    );
    print_json(&summary)?;
    Ok(0)
}

/// Writes `phi.csv`, `phi.svg` (first repetition) and returns the reports.
fn write_phi_outputs(
    dir: &Path,
    reps: &[Vec<RoundTranscript>],
    params: &ProtocolParams,
    plan: &Plan,
    k: usize,
    stem: &str,
) -> Result<Vec<RepetitionReport>> {
    let mut reports = Vec::new();
    let mut stats = Vec::new();
    for (i, ts) in reps.iter().enumerate() {
        let (r, s) = analyse_repetition(ts, i, params, plan, k);
        reports.push(r);
        stats.push(s);
    }
    let idx: Vec<Vec<u64>> = reps.iter().map(|ts| ts.iter().map(|t| t.round_index).collect()).collect();
    let ranges: Vec<Vec<_>> = reports.iter().map(|r| r.baskets.iter().map(|b| b.range.clone()).collect()).collect();
    let series: Vec<Series<'_>> = (0..reps.len())
        .map(|i| Series {
            round_index: &idx[i],
            phi: &stats[i].phi,
            baskets: &ranges[i],
        })
        .collect();
    let csv = fs::File::create(dir.join(format!("{stem}.csv")))?;
    write_phi_csv(std::io::BufWriter::new(csv), &series)?;
    if let Some(first) = series.first() {
        fs::write(dir.join(format!("{stem}.svg")), phi_svg(first, params.p_tilde))?;
    }
    Ok(reports)
}

fn cmd_mitigate(a: &MitigateArgs) -> Result<u8> {
    if let Some(m) = &a.manifest {
        let manifest: RunManifest = io::read_json(m)?;
        let stale = manifest.stale_inputs()?;
        if !stale.is_empty() {
            bail!("files changed since the run: {stale:?}");
        }
    }
    let exp = Experiment::load(&a.config)?;
    let params = &exp.config.protocol;
    let k = exp.colouring.k();
    let stream = io::read_transcripts(&a.transcripts)?;
    let reps: Vec<Vec<RoundTranscript>> = stream.chunks(params.n_prime.max(1)).map(<[_]>::to_vec).collect();
    let outcome = drive_protocol(params, k, &mut ReplaySource::new(reps.clone()))?;
    let dir = out_dir(&a.out, exp.config.output_dir.as_deref())?;
    if let Some(plan) = &outcome.plan {
        let used = reps.len().min(outcome.repetitions.len().max(1));
        write_phi_outputs(&dir, &reps[..used], params, plan, k, "phi")?;
    }
    let baskets: Vec<_> = outcome.baskets().collect();
    io::write_json(&dir.join("baskets.json"), &baskets)?;
    io::write_json(&dir.join("verdict.json"), &outcome)?;
    print_json(&verdict_summary(&outcome))?;
    Ok(if outcome.is_abort() { EXIT_ABORT } else { 0 })
}

fn verdict_summary(o: &ProtocolOutcome) -> serde_json::Value {
    json!({
        "status": o.status,
        "abort": o.abort,
        "confidence": o.confidence,
        "posterior": o.posterior,
        "repetitions": o.repetitions.len(),
        "baskets": o.baskets().map(|b| json!({
            "repetition": b.repetition,
            "range": [b.range.start, b.range.end],
            "size": b.size,
            "vote": b.vote,
            "eps": b.certificate().map(|c| c.eps),
        })).collect::<Vec<_>>(),
    })
}

fn cmd_report(a: &ReportArgs) -> Result<u8> {
    let (params, k, cfg_out) = match &a.config {
        Some(c) => {
            let exp = Experiment::load(c)?;
            (exp.config.protocol.clone(), exp.colouring.k(), exp.config.output_dir.clone())
        }
        None => (
            ProtocolParams {
                n: Some(a.n),
                window: a.window,
                p_tilde: a.p_tilde,
                groups: a.groups,
                ..ProtocolParams::new(a.n_prime.unwrap_or(usize::MAX))
            },
            2,
            None,
        ),
    };
    let stream = io::read_transcripts(&a.transcripts)?;
    let n_prime = a.n_prime.unwrap_or(params.n_prime).min(stream.len()).max(1);
    let reps: Vec<Vec<RoundTranscript>> = stream.chunks(n_prime).map(<[_]>::to_vec).collect();
    // Only basket detection matters here, so N is taken as given.
    let plan = Plan {
        n: params.n.unwrap_or(a.n),
        tau: params.tau.unwrap_or(0.9),
        estimate: None,
    };
    let dir = out_dir(&a.out, cfg_out.as_deref())?;
    let reports = write_phi_outputs(&dir, &reps, &params, &plan, k, "phi")?;
    let baskets: Vec<_> = reports
        .iter()
        .flat_map(|r| r.baskets.iter().map(move |b| json!({"repetition": r.repetition, "range": [b.range.start, b.range.end]})))
        .collect();
    print_json(&json!({
        "rounds": stream.len(),
        "csv": dir.join("phi.csv"),
        "svg": dir.join("phi.svg"),
        "baskets": baskets,
    }))?;
    Ok(0)
}

#[derive(Debug, Serialize)]
struct OracleRow {
    input: String,
    expected: String,
    observed: Vec<String>,
    correct: bool,
}

fn bits(v: &[u8]) -> String {
    v.iter().map(|b| char::from(b'0' + b)).collect()
}

fn cmd_oracle(a: &OracleArgs) -> Result<u8> {
    let pattern = match &a.pattern {
        Some(p) => MeasurementPattern::from_file(&io::read_json::<PatternFile>(p)?)?,
        None => cnot15().0,
    };
    let m = pattern.outputs().len();
    let mut rows = Vec::new();
    for x in all_inputs(pattern.inputs().len()) {
        let expected = match (a.expect.as_deref(), x.as_slice()) {
            (Some("cnot"), &[c, t]) => Some(cnot_truth_table([c, t]).to_vec()),
            (Some(_), _) => bail!("--expect cnot needs a two-input pattern"),
            (None, _) => None,
        };
        let semantic = deterministic_output(&pattern, &x)?;
        let dist = exact_output_distribution(&pattern, &x)?;
        let spec = ComputationRoundSpec::new(&pattern, x.clone(), DecisionMap::accepting::<&str>(m, &[])?)?;
        let mut observed = Vec::new();
        let mut correct = expected.is_none() || expected == semantic;
        for run in 0..a.runs {
            let mut rng = crate::mitigate::round_rng(a.seed, run as u64);
            let t = run_computation_round(&spec, &NoiseModel::noiseless(), run as u64, ExecOrder::Lazy, &mut rng)?;
            let out = t.output_bits(&pattern)?;
            let key = out.iter().fold(0usize, |k, &b| (k << 1) | usize::from(b));
            correct &= match &semantic {
                Some(s) => *s == out,
                None => dist[key] > 1e-9,
            };
            let s = bits(&out);
            if !observed.contains(&s) {
                observed.push(s);
            }
        }
        rows.push(OracleRow {
            input: bits(&x),
            expected: expected.or(semantic).map_or_else(|| "random".into(), |v| bits(&v)),
            observed,
            correct,
        });
    }
    let ok = rows.iter().filter(|r| r.correct).count();
    for r in &rows {
        eprintln!("{} -> {} observed {:?} {}", r.input, r.expected, r.observed, if r.correct { "ok" } else { "MISMATCH" });
    }
    eprintln!("{ok}/{} inputs correct", rows.len());
    print_json(&json!({"correct": ok, "total": rows.len(), "rows": rows}))?;
    Ok(if ok == rows.len() { 0 } else { EXIT_ERROR })
}

/// Protocol settings of the built-in CNOT experiment.
pub fn reference_params() -> ProtocolParams {
    ProtocolParams {
        n: Some(10_000),
        tau: Some(0.9),
        ..ProtocolParams::new(100_000)
    }
}

/// Walk (or constant 0.9) noise for the built-in experiment.
pub fn reference_noise(seed: u64, constant: bool) -> NoiseSchedule {
    if constant {
        NoiseSchedule::constant(0.9)
    } else {
        NoiseSchedule::random_walk(seed)
    }
}

/// Runs the built-in experiment: CNOT on `x = 11`, accepting output `10`.
pub fn run_reference_experiment(seed: u64, constant: bool) -> Result<(ProtocolOutcome, Vec<Vec<RoundTranscript>>)> {
    let (p, c) = cnot15();
    let decision = DecisionMap::accepting(2, CNOT15_DECISION_ACCEPT)?;
    let setup = crate::mitigate::RunSetup {
        computation: ComputationRoundSpec::new(&p, vec![1, 1], decision)?,
        test: TestRoundSpec::new(&p, &c)?,
        base: default_base_model(),
        gain: DEFAULT_EXPERIMENT_GAIN,
        noise: reference_noise(seed, constant),
        master_seed: seed,
        order: ExecOrder::Lazy,
    };
    let mut src = SimulationSource::new(setup).keeping();
    let outcome = drive_protocol(&reference_params(), c.k(), &mut src)?;
    Ok((outcome, src.produced))
}

#[derive(Debug, Serialize)]
struct Row {
    quantity: String,
    reference: String,
    obtained: String,
}

fn cmd_reproduce_paper(a: &ReproduceArgs) -> Result<u8> {
    let dir = out_dir(&a.out, None)?;
    let mut rows = Vec::new();
    let mut row = |q: &str, p: String, o: String| rows.push(Row { quantity: q.into(), reference: p, obtained: o });

    let free = minimize_n_given_eps(&BoundInputs::new(2, 0.0, 0.15, None), 0.05, DEFAULT_N_CEILING);
    let fixed = minimize_n_given_eps(&BoundInputs::new(2, 0.0, 0.15, Some(0.9)), 0.05, DEFAULT_N_CEILING);
    let show = |r: &EstimationResult, f: fn(&crate::estimate::Estimate) -> String| r.done().map_or("abort".into(), f);
    row("tau for eps_target 0.05", "0.90".into(), show(&free, |e| format!("{:.2} (n = {})", e.tau, e.n)));
    row("n for eps_target 0.05 at tau 0.90", "10000 (N used)".into(), show(&fixed, |e| e.n.to_string()));
    for (n, reference) in [(5198u64, "0.17"), (6818, "0.08")] {
        let r = crate::estimate::minimize_eps_given_n(&BoundInputs::new(2, 0.0, 0.15, Some(0.9)), n);
        row(&format!("eps_max at n = {n}"), reference.into(), show(&r, |e| format!("{:.4}", e.eps_max)));
    }
    let mut post = Posterior::uniform();
    post.update([0.17, 0.83])?;
    post.update([0.08, 0.92])?;
    row("combined confidence of (0.17, 0.08)", "0.98".into(), format!("{:.6}", post.p1()));

    let plan_fixed = plan(&reference_params(), 2).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut outcomes = Vec::new();
    for (constant, name) in [(false, "fluctuating"), (true, "constant")] {
        let (outcome, produced) = run_reference_experiment(a.seed, constant)?;
        write_phi_outputs(&dir, &produced[..1], &reference_params(), &plan_fixed, 2, &format!("phi_{name}"))?;
        io::write_transcripts(&dir.join(format!("transcripts_{name}.jsonl")), &produced[0])?;
        io::write_json(&dir.join(format!("verdict_{name}.json")), &outcome)?;
        let first = &outcome.repetitions[0];
        row(
            &format!("{name}: baskets in first {} rounds", first.rounds),
            if constant { "0" } else { "2" }.into(),
            format!(
                "{} (sizes {:?})",
                first.baskets.len(),
                first.baskets.iter().map(|b| b.size).collect::<Vec<_>>()
            ),
        );
        row(
            &format!("{name}: verdict"),
            if constant { "no baskets" } else { "True, 0.98" }.into(),
            match outcome.status {
                ProtocolStatus::Abort => format!("abort ({})", serde_json::to_value(&outcome.abort)?["reason"]),
                s => format!(
                    "{s:?}, {:.4} after {} repetition(s)",
                    outcome.confidence.unwrap_or(0.0),
                    outcome.repetitions.len()
                ),
            },
        );
        outcomes.push(outcome);
    }
    println!("| quantity | reference | obtained |\n|---|---|---|");
    for r in &rows {
        println!("| {} | {} | {} |", r.quantity, r.reference, r.obtained);
    }
    io::write_json(&dir.join("reproduce.json"), &json!({"seed": a.seed, "rows": rows}))?;
    eprintln!("outputs in {} (set {OUT_DIR_ENV} or --out to change)", dir.display());
    Ok(if outcomes[0].status == ProtocolStatus::True { 0 } else { EXIT_ABORT })
}

fn cmd_calibrate(a: &CalibrateArgs) -> Result<u8> {
    let exp = Experiment::load(&a.config)?;
    let cal = calibrate(&exp.setup(), a.target, a.level, a.rounds, a.iterations)?;
    if let Some(p) = &a.write {
        io::write_json(p, &cal.model)?;
    }
    print_json(&cal)?;
    Ok(0)
}
