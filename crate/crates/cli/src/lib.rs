//! `alp` command-line tool: solve, optimize a fixed sequence, benchmark, verify.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 infeasible input,
//! 3 verification mismatch.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use alp_core::anneal::{anneal, write_trace_csv, AnnealOutcome, SAConfig};
use alp_core::report::{
    write_bench_csv, BenchRow, ReferenceKind, ReferenceTable, RunRecord, Suite,
};
use alp_core::runway::MultiRunwaySolution;
use alp_core::scheduler::evaluate_penalty;
use alp_core::{
    feasibility_check, optimize_sequence, parse_airland, AlpError, Cost, FeasibilityReport,
    Instance, Schedule, SeparationMode, Time, Violation,
};
use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "alp/1";
pub const DEFAULT_DATA_DIR: &str = "data/airland";
pub const DATA_DIR_ENV: &str = "ALP_DATA_DIR";
pub const VERIFY_TOLERANCE: f64 = 1e-6;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "alp", version, about = "Aircraft landing scheduler")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search landing sequences with simulated annealing.
    Solve(SolveArgs),
    /// Optimal landing times for one given sequence on one runway.
    Sequence(SequenceArgs),
    /// Replicated runs over the airland instances, as CSV.
    Bench(BenchArgs),
    /// Re-check a solution file against its instance.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub runways: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20_000)]
    pub budget_iters: usize,
    #[arg(long)]
    pub budget_seconds: Option<f64>,
    #[arg(long, default_value = "all-pairs")]
    pub mode: SeparationMode,
    /// Stop once this penalty is reached.
    #[arg(long)]
    pub target: Option<f64>,
    /// Write the per-iteration trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Comma-separated 1-based aircraft numbers.
    #[arg(long)]
    pub sequence: String,
    #[arg(long, default_value = "all-pairs")]
    pub mode: SeparationMode,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "small")]
    pub suite: Suite,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub replications: u64,
    /// Seed of the first replication; later ones count up from it.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// Reference table; the bundled one when omitted.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Directory holding `airlandK.txt`; defaults to $ALP_DATA_DIR or data/airland.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Benchmark these files instead of the suite (name = file stem).
    #[arg(long, num_args = 1..)]
    pub instances: Vec<PathBuf>,
    /// Runway counts; defaults to those in the reference table, else 1.
    #[arg(long, value_delimiter = ',')]
    pub runways: Vec<usize>,
    #[arg(long, default_value_t = 20_000)]
    pub budget_iters: usize,
    #[arg(long)]
    pub budget_seconds: Option<f64>,
    #[arg(long, default_value = "all-pairs")]
    pub mode: SeparationMode,
    /// Write the best solution of every row as `<instance>_R<r>.json` here.
    #[arg(long)]
    pub solutions_dir: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub schedule: PathBuf,
    /// Defaults to the mode recorded in the solution.
    #[arg(long)]
    pub mode: Option<SeparationMode>,
}

/// One runway of a solution; aircraft are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunwayOutput {
    pub runway: usize,
    pub sequence: Vec<usize>,
    pub times: Vec<Time>,
    pub penalty: Cost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityOutput {
    pub feasible_windows: bool,
    pub feasible_adjacent: bool,
    pub feasible_all_pairs: bool,
    pub violations: Vec<Violation>,
}

impl FeasibilityOutput {
    fn merge(reports: &[FeasibilityReport]) -> Self {
        FeasibilityOutput {
            feasible_windows: reports.iter().all(|r| r.feasible_windows),
            feasible_adjacent: reports.iter().all(|r| r.feasible_adjacent),
            feasible_all_pairs: reports.iter().all(|r| r.feasible_all_pairs),
            violations: reports
                .iter()
                .flat_map(|r| r.violations.iter().map(one_based))
                .collect(),
        }
    }
}

fn one_based(v: &Violation) -> Violation {
    match *v {
        Violation::Window {
            aircraft,
            magnitude,
        } => Violation::Window {
            aircraft: aircraft + 1,
            magnitude,
        },
        Violation::Separation {
            first,
            second,
            magnitude,
        } => Violation::Separation {
            first: first + 1,
            second: second + 1,
            magnitude,
        },
    }
}

/// JSON document written by `solve`, `sequence` and `bench --solutions-dir`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionOutput {
    pub schema: String,
    pub instance: String,
    pub mode: SeparationMode,
    pub runways: usize,
    pub penalty: Cost,
    pub schedules: Vec<RunwayOutput>,
    pub feasibility: FeasibilityOutput,
    pub certified_optimal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

impl SolutionOutput {
    pub fn from_schedules(
        inst: &Instance,
        instance: &str,
        mode: SeparationMode,
        schedules: &[Schedule],
    ) -> anyhow::Result<Self> {
        let mut reports = Vec::with_capacity(schedules.len());
        for s in schedules {
            reports.push(feasibility_check(inst, &s.sequence, &s.times, mode)?);
        }
        Ok(SolutionOutput {
            schema: SCHEMA.to_string(),
            instance: instance.to_string(),
            mode,
            runways: schedules.len(),
            penalty: schedules.iter().map(|s| s.penalty).sum(),
            schedules: schedules
                .iter()
                .enumerate()
                .map(|(r, s)| RunwayOutput {
                    runway: r + 1,
                    sequence: s.sequence.iter().map(|a| a + 1).collect(),
                    times: s.times.clone(),
                    penalty: s.penalty,
                })
                .collect(),
            feasibility: FeasibilityOutput::merge(&reports),
            certified_optimal: schedules.iter().all(|s| s.certified_optimal),
            trace: None,
            seed: None,
            iterations: None,
            seconds: None,
        })
    }

    fn from_multi(
        inst: &Instance,
        instance: &str,
        mode: SeparationMode,
        solution: &MultiRunwaySolution,
    ) -> anyhow::Result<Self> {
        let mut out = Self::from_schedules(inst, instance, mode, &solution.schedules)?;
        out.penalty = solution.total_penalty;
        Ok(out)
    }
}

/// Outcome of checking a solution document against an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: String,
    pub ok: bool,
    pub declared_penalty: Cost,
    pub recomputed_penalty: Cost,
    pub feasibility: FeasibilityOutput,
    pub problems: Vec<String>,
}

/// Re-checks feasibility, coverage and the penalty of `solution`.
pub fn verify_solution(
    inst: &Instance,
    solution: &SolutionOutput,
    mode: SeparationMode,
) -> anyhow::Result<VerifyReport> {
    let n = inst.n();
    let mut problems = Vec::new();
    if solution.schema != SCHEMA {
        problems.push(format!("schema `{}` is not {SCHEMA}", solution.schema));
    }
    let mut seen = vec![0usize; n];
    let mut reports = Vec::new();
    let mut recomputed = 0.0;
    for rw in &solution.schedules {
        if rw.sequence.len() != rw.times.len() {
            problems.push(format!(
                "runway {}: {} aircraft but {} times",
                rw.runway,
                rw.sequence.len(),
                rw.times.len()
            ));
            continue;
        }
        let mut seq = Vec::with_capacity(rw.sequence.len());
        for &a in &rw.sequence {
            if a == 0 || a > n {
                problems.push(format!("runway {}: aircraft {a} does not exist", rw.runway));
            } else {
                seen[a - 1] += 1;
                seq.push(a - 1);
            }
        }
        if seq.len() != rw.sequence.len() || seen.iter().any(|&c| c > 1) {
            continue;
        }
        let report = feasibility_check(inst, &seq, &rw.times, mode)?;
        let penalty = evaluate_penalty(inst, &seq, &rw.times);
        if !close(penalty, rw.penalty) {
            problems.push(format!(
                "runway {}: declared penalty {} but times give {penalty}",
                rw.runway, rw.penalty
            ));
        }
        recomputed += penalty;
        reports.push(report);
    }
    for (a, &c) in seen.iter().enumerate() {
        match c {
            0 => problems.push(format!("aircraft {} is not scheduled", a + 1)),
            1 => {}
            _ => problems.push(format!("aircraft {} is scheduled {c} times", a + 1)),
        }
    }
    let feasibility = FeasibilityOutput::merge(&reports);
    for v in &feasibility.violations {
        problems.push(format!("violation: {}", serde_json::to_string(v)?));
    }
    let feasible = feasibility.feasible_windows
        && match mode {
            SeparationMode::AdjacentOnly => feasibility.feasible_adjacent,
            SeparationMode::AllPairs => feasibility.feasible_all_pairs,
        };
    if !feasible && feasibility.violations.is_empty() {
        problems.push("schedule is infeasible".into());
    }
    if !close(recomputed, solution.penalty) {
        problems.push(format!(
            "declared total penalty {} but times give {recomputed}",
            solution.penalty
        ));
    }
    Ok(VerifyReport {
        schema: SCHEMA.to_string(),
        ok: problems.is_empty(),
        declared_penalty: solution.penalty,
        recomputed_penalty: recomputed,
        feasibility,
        problems,
    })
}

fn close(a: Cost, b: Cost) -> bool {
    (a - b).abs() <= VERIFY_TOLERANCE * b.abs().max(1.0)
}

/// Reads an instance in the airland text format or as JSON.
pub fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let inst = if text.trim_start().starts_with('{') {
        Instance::from_json(&text)
    } else {
        parse_airland(&text)
    };
    inst.with_context(|| format!("loading {}", path.display()))
}

/// Comma-separated 1-based aircraft numbers to 0-based indices.
pub fn parse_sequence(text: &str, n: usize) -> anyhow::Result<Vec<usize>> {
    let mut seq = Vec::new();
    let mut seen = vec![false; n];
    for tok in text.split(',') {
        let tok = tok.trim();
        let a: usize = tok
            .parse()
            .map_err(|_| anyhow!("`{tok}` is not an aircraft number"))?;
        if a == 0 || a > n {
            bail!("aircraft {a} does not exist (instance has {n})");
        }
        if std::mem::replace(&mut seen[a - 1], true) {
            bail!("aircraft {a} appears more than once");
        }
        seq.push(a - 1);
    }
    if seq.len() != n {
        bail!("sequence lists {} of {n} aircraft", seq.len());
    }
    Ok(seq)
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn is_infeasible(e: &anyhow::Error) -> bool {
    matches!(
        e.downcast_ref::<AlpError>(),
        Some(
            AlpError::InfeasibleSequence { .. }
                | AlpError::InfeasibleAssignment { .. }
                | AlpError::NoFeasibleSequence(_)
        )
    )
}

fn sa_config(
    seed: u64,
    iters: usize,
    seconds: Option<f64>,
    mode: SeparationMode,
    target: Option<f64>,
) -> SAConfig {
    SAConfig {
        seed,
        max_iterations: iters,
        max_seconds: seconds,
        mode,
        target_penalty: target,
        ..SAConfig::default()
    }
}

fn run_anneal(inst: &Instance, runways: usize, cfg: &SAConfig) -> anyhow::Result<AnnealOutcome> {
    Ok(anneal(inst, runways, cfg)?)
}

fn cmd_solve(args: &SolveArgs) -> anyhow::Result<i32> {
    let inst = load_instance(&args.instance)?;
    let runways = args.runways as usize;
    let cfg = sa_config(
        args.seed,
        args.budget_iters,
        args.budget_seconds,
        args.mode,
        args.target,
    );
    cfg.validate()?;
    let outcome = run_anneal(&inst, runways, &cfg)?;
    let mut out = SolutionOutput::from_multi(
        &inst,
        &args.instance.display().to_string(),
        args.mode,
        &outcome.solution,
    )?;
    if let Some(path) = &args.trace {
        let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
        write_trace_csv(&outcome.trace, io::BufWriter::new(file))?;
        out.trace = Some(path.display().to_string());
    }
    out.seed = Some(args.seed);
    out.iterations = Some(outcome.iterations);
    out.seconds = Some(outcome.elapsed.as_secs_f64());
    write_output(args.out.as_deref(), &to_json(&out)?)?;
    Ok(EXIT_OK)
}

fn cmd_sequence(args: &SequenceArgs) -> anyhow::Result<i32> {
    let inst = load_instance(&args.instance)?;
    let seq = parse_sequence(&args.sequence, inst.n())?;
    let schedule = optimize_sequence(&inst, &seq, args.mode)?;
    let out = SolutionOutput::from_schedules(
        &inst,
        &args.instance.display().to_string(),
        args.mode,
        std::slice::from_ref(&schedule),
    )?;
    write_output(args.out.as_deref(), &to_json(&out)?)?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<i32> {
    let inst = load_instance(&args.instance)?;
    let text = fs::read_to_string(&args.schedule)
        .with_context(|| format!("reading {}", args.schedule.display()))?;
    let solution: SolutionOutput = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.schedule.display()))?;
    let mode = args.mode.unwrap_or(solution.mode);
    let report = verify_solution(&inst, &solution, mode)?;
    println!("{}", serde_json::to_string(&report)?);
    if report.ok {
        Ok(EXIT_OK)
    } else {
        for p in &report.problems {
            eprintln!("alp verify: {p}");
        }
        Ok(EXIT_MISMATCH)
    }
}

pub fn data_dir(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR))
}

/// `airlandK.txt`, falling back to `airlandK`.
fn suite_file(dir: &Path, name: &str) -> Option<PathBuf> {
    [dir.join(format!("{name}.txt")), dir.join(name)]
        .into_iter()
        .find(|p| p.is_file())
}

fn cmd_bench(args: &BenchArgs) -> anyhow::Result<i32> {
    let reference = match &args.reference {
        Some(p) => ReferenceTable::load(p)?,
        None => ReferenceTable::bundled(),
    };
    let mut targets: Vec<(String, PathBuf)> = Vec::new();
    if args.instances.is_empty() {
        let dir = data_dir(args.data_dir.as_deref());
        for name in args.suite.instances() {
            match suite_file(&dir, &name) {
                Some(p) => targets.push((name, p)),
                None => eprintln!("alp bench: skipping {name}: no file in {}", dir.display()),
            }
        }
    } else {
        for p in &args.instances {
            let name = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .ok_or_else(|| anyhow!("bad instance path {}", p.display()))?;
            targets.push((name, p.clone()));
        }
    }
    if let Some(dir) = &args.solutions_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }

    let mut rows = Vec::new();
    for (name, path) in &targets {
        let inst = load_instance(path)?;
        let runway_counts = if !args.runways.is_empty() {
            args.runways.clone()
        } else {
            match reference.runway_counts(name) {
                rs if rs.is_empty() => vec![1],
                rs => rs,
            }
        };
        for &r in &runway_counts {
            if r == 0 {
                bail!("runway count must be at least 1");
            }
            let entry = reference.lookup(name, r);
            let target = entry
                .filter(|e| e.kind == ReferenceKind::Opt)
                .map(|e| e.reference);
            let mut runs = Vec::new();
            let mut best: Option<AnnealOutcome> = None;
            for k in 0..args.replications {
                let seed = args.seeds + k;
                let cfg = sa_config(
                    seed,
                    args.budget_iters,
                    args.budget_seconds,
                    args.mode,
                    target,
                );
                let started = Instant::now();
                let outcome = run_anneal(&inst, r, &cfg)?;
                runs.push(RunRecord {
                    seed,
                    penalty: outcome.penalty,
                    seconds: started.elapsed().as_secs_f64(),
                    iterations: outcome.iterations,
                });
                if best.as_ref().is_none_or(|b| outcome.penalty < b.penalty) {
                    best = Some(outcome);
                }
            }
            let row = BenchRow::aggregate(name, inst.n(), r, runs, entry.map(|e| e.reference))?;
            if let (Some(dir), Some(best)) = (&args.solutions_dir, &best) {
                let mut sol = SolutionOutput::from_multi(
                    &inst,
                    &path.display().to_string(),
                    args.mode,
                    &best.solution,
                )?;
                sol.iterations = Some(best.iterations);
                fs::write(dir.join(format!("{name}_R{r}.json")), to_json(&sol)?)?;
            }
            eprintln!("alp bench: {name} R={r} best={} gap={}", row.best, row.gap);
            rows.push(row);
        }
    }

    let mut buf = Vec::new();
    write_bench_csv(&rows, &mut buf)?;
    write_output(args.out.as_deref(), std::str::from_utf8(&buf)?)?;
    Ok(EXIT_OK)
}

pub fn execute(cli: &Cli) -> anyhow::Result<i32> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sequence(a) => cmd_sequence(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("alp: {e:#}");
            if is_infeasible(&e) {
                EXIT_INFEASIBLE
            } else {
                EXIT_USAGE
            }
        }
    }
}
