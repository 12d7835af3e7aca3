//! Command-line harness: `run`, `assign`, `list` and `wilcoxon`.
//!
//! Exit codes are 0 on success, 1 when a run fails and 2 for usage or
//! configuration errors.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{rank_sum_test, significance_label, summarize, xpl_xpt, RankSumMethod};
use crate::assignment::{brute_force, call_handle_time, optimize_assignment, CallTimeBreakdown, CostMatrix, BRUTE_FORCE_LIMIT};
use crate::benchmarks::{DimensionRule, Registry};
use crate::optimizers::{run_objective, Algorithm, RunConfig, RunResult};
use crate::swarm::{AcceptanceMode, AlgoParams};
use crate::benchmarks::ObjectiveSpec;
use crate::Error;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "BATOPT_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "batopt-out";

#[derive(Debug, Parser)]
#[command(name = "batopt", version, about = "Bat algorithm experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Seeded batch of runs over benchmark objectives.
    Run(RunArgs),
    /// Caller-to-agent assignment from a cost matrix CSV.
    Assign(AssignArgs),
    /// List the registered objectives.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Wilcoxon rank-sum p-value for a two-column CSV.
    Wilcoxon {
        input: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Summary,
    History,
    Diversity,
    Pvalues,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long = "algo", value_delimiter = ',', default_value = "BA,MBA")]
    algorithms: Vec<Algorithm>,
    /// Objective names, optionally with a dimension as `F1:10`.
    #[arg(long = "fn", value_delimiter = ',', required = true)]
    objectives: Vec<String>,
    /// Dimension for scalable objectives without an explicit `:d`.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 30)]
    pop: usize,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long, default_value_t = 30)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = AcceptanceMode::PaperLiteral)]
    acceptance: AcceptanceMode,
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "summary")]
    emit: Vec<Emit>,
}

#[derive(Debug, Args)]
struct AssignArgs {
    /// Cost matrix CSV; the built-in 4x4 call-center matrix when omitted.
    matrix: Option<PathBuf>,
    #[arg(long = "algo", default_value = "MBA")]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 30)]
    pop: usize,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = AcceptanceMode::PaperLiteral)]
    acceptance: AcceptanceMode,
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) => m,
        }
    }
}

fn config_err(e: impl ToString) -> Failure {
    Failure::Config(e.to_string())
}

fn runtime_err(e: impl ToString) -> Failure {
    Failure::Runtime(e.to_string())
}

fn io_err(path: &Path, e: io::Error) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

/// Parses `std::env::args` and runs the selected command.
pub fn main() -> i32 {
    run_with_args(std::env::args_os())
}

pub fn run_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Assign(args) => cmd_assign(&args),
        Command::List { json } => cmd_list(json),
        Command::Wilcoxon { input } => cmd_wilcoxon(&input),
    };
    match outcome {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn out_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

struct Target {
    label: String,
    spec: ObjectiveSpec,
}

fn resolve_targets(registry: &Registry, names: &[String], dim: Option<usize>) -> Result<Vec<Target>, Failure> {
    let mut targets = Vec::new();
    for raw in names {
        let raw = raw.trim();
        let (name, explicit) = match raw.split_once(':') {
            Some((n, d)) => {
                let d = d
                    .parse::<usize>()
                    .map_err(|_| config_err(format!("--fn `{raw}`: dimension `{d}` is not a positive integer")))?;
                (n, Some(d))
            }
            None => (raw, None),
        };
        let entry = registry
            .find(name)
            .ok_or_else(|| config_err(format!("--fn: {}", Error::UnknownObjective(name.to_string()))))?;
        let dimension = match (entry.rule, explicit) {
            (_, Some(d)) => Some(d),
            (DimensionRule::Scalable { .. }, None) => dim,
            (DimensionRule::Fixed(_), None) => None,
        };
        let spec = registry
            .lookup(name, dimension)
            .map_err(|e| config_err(format!("--fn `{raw}`: {e}")))?;
        let label = match explicit {
            Some(_) => raw.to_string(),
            None => entry.name.clone(),
        };
        targets.push(Target { label, spec });
    }
    Ok(targets)
}

fn base_config(algorithm: Algorithm, pop: usize, iters: usize, acceptance: AcceptanceMode) -> RunConfig {
    let mut config = RunConfig::new(algorithm, "");
    config.population = pop;
    config.iterations = iters;
    config.params = AlgoParams { acceptance_mode: acceptance, ..AlgoParams::default() };
    config
}

#[derive(Serialize)]
struct SummaryRow {
    function: String,
    ba_mean: Option<f64>,
    ba_std: Option<f64>,
    mba_mean: Option<f64>,
    mba_std: Option<f64>,
    p_value: Option<f64>,
    label: Option<String>,
}

#[derive(Serialize)]
struct SummaryJson<'a> {
    base_seed: u64,
    runs: usize,
    seed_rule: &'static str,
    population: usize,
    iterations: usize,
    acceptance: String,
    rows: &'a [SummaryRow],
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn seed_header(base: u64, runs: usize) -> String {
    format!("# per-run seed = base_seed + run_index; base_seed={base}; runs={runs}\n")
}

fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    if args.runs < 1 {
        return Err(config_err("--runs must be at least 1"));
    }
    let mut algorithms = Vec::new();
    for a in [Algorithm::Ba, Algorithm::Mba] {
        if args.algorithms.contains(&a) {
            algorithms.push(a);
        }
    }
    let both = algorithms.len() == 2;
    if args.emit.contains(&Emit::Pvalues) && !(both && args.runs >= 3) {
        return Err(config_err("--emit pvalues needs --algo BA,MBA and --runs >= 3"));
    }
    let registry = Registry::standard();
    let targets = resolve_targets(&registry, &args.objectives, args.dim)?;
    for &a in &algorithms {
        base_config(a, args.pop, args.iters, args.acceptance).validate().map_err(config_err)?;
    }

    let dir = out_dir(&args.out);
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    let history_dir = dir.join("history");
    if args.emit.contains(&Emit::History) {
        fs::create_dir_all(&history_dir).map_err(|e| io_err(&history_dir, e))?;
    }
    let want_div = args.emit.contains(&Emit::Diversity);

    let mut rows = Vec::new();
    let mut div_csv = String::from("function,algorithm,xpl_final,xpt_final,xpl_mean,xpt_mean\n");
    let mut p_csv = seed_header(args.seed, args.runs);
    p_csv.push_str("function,p_value,method\n");

    println!(
        "{:<10} {:>13} {:>12} {:>13} {:>12} {:>11} {:>5} {:>9}",
        "function", "ba_mean", "ba_std", "mba_mean", "mba_std", "p", "label", "time_s"
    );
    for target in &targets {
        let started = Instant::now();
        let mut finals: [Option<Vec<f64>>; 2] = [None, None];
        for &algorithm in &algorithms {
            let mut results: Vec<RunResult> = Vec::with_capacity(args.runs);
            for run in 0..args.runs {
                let mut config = base_config(algorithm, args.pop, args.iters, args.acceptance);
                config.objective = target.spec.name().to_string();
                config.seed = args.seed.wrapping_add(run as u64);
                config.record_diversity = want_div;
                let result = run_objective(&config, target.spec.clone())
                    .map_err(|e| runtime_err(format!("{} {algorithm} seed {}: {e}", target.label, config.seed)))?;
                if args.emit.contains(&Emit::History) {
                    let name = format!("{}_{algorithm}_seed{}.csv", file_stem(&target.label), config.seed);
                    let path = history_dir.join(name);
                    let mut buf = Vec::new();
                    result.write_csv(&mut buf).map_err(|e| io_err(&path, e))?;
                    fs::write(&path, buf).map_err(|e| io_err(&path, e))?;
                }
                results.push(result);
            }
            if want_div {
                let (mut xf, mut tf, mut xm, mut tm) = (0.0, 0.0, 0.0, 0.0);
                for r in &results {
                    let series = xpl_xpt(r.diversity_history.as_deref().unwrap_or(&[])).map_err(runtime_err)?;
                    xf += series.xpl.last().copied().unwrap_or(0.0);
                    tf += series.xpt.last().copied().unwrap_or(100.0);
                    xm += series.mean_xpl();
                    tm += series.mean_xpt();
                }
                let k = results.len() as f64;
                let _ = writeln!(
                    div_csv,
                    "{},{algorithm},{:e},{:e},{:e},{:e}",
                    target.label,
                    xf / k,
                    tf / k,
                    xm / k,
                    tm / k
                );
            }
            let slot = usize::from(algorithm == Algorithm::Mba);
            finals[slot] = Some(results.iter().map(|r| r.best_fitness).collect());
        }

        let stats = |v: &Option<Vec<f64>>| -> Result<Option<(f64, f64)>, Failure> {
            match v {
                Some(v) => summarize(v).map(|s| Some((s.mean, s.std))).map_err(runtime_err),
                None => Ok(None),
            }
        };
        let ba = stats(&finals[0])?;
        let mba = stats(&finals[1])?;
        let mut p_value = None;
        if let (Some(a), Some(b)) = (&finals[0], &finals[1]) {
            if args.runs >= 3 {
                let outcome = rank_sum_test(b, a).map_err(runtime_err)?;
                let method = match outcome.method {
                    RankSumMethod::Exact => "exact",
                    RankSumMethod::Normal => "normal",
                };
                let _ = writeln!(p_csv, "{},{:e},{method}", target.label, outcome.p_value);
                p_value = Some(outcome.p_value);
            }
        }
        let label = match (ba, mba) {
            (Some(b), Some(m)) => Some(significance_label(m.0, b.0).to_string()),
            _ => None,
        };
        let row = SummaryRow {
            function: target.label.clone(),
            ba_mean: ba.map(|s| s.0),
            ba_std: ba.map(|s| s.1),
            mba_mean: mba.map(|s| s.0),
            mba_std: mba.map(|s| s.1),
            p_value,
            label,
        };
        let show = |v: Option<f64>| v.map(|x| format!("{x:.4e}")).unwrap_or_else(|| "-".into());
        println!(
            "{:<10} {:>13} {:>12} {:>13} {:>12} {:>11} {:>5} {:>9.3}",
            row.function,
            show(row.ba_mean),
            show(row.ba_std),
            show(row.mba_mean),
            show(row.mba_std),
            row.p_value.map(|p| format!("{p:.3e}")).unwrap_or_else(|| "-".into()),
            row.label.as_deref().unwrap_or("-"),
            started.elapsed().as_secs_f64()
        );
        rows.push(row);
    }

    if args.emit.contains(&Emit::Summary) {
        let mut csv = seed_header(args.seed, args.runs);
        csv.push_str("function,ba_mean,ba_std,mba_mean,mba_std,p_value,label\n");
        for r in &rows {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                r.function,
                cell(r.ba_mean),
                cell(r.ba_std),
                cell(r.mba_mean),
                cell(r.mba_std),
                cell(r.p_value),
                r.label.as_deref().unwrap_or("")
            );
        }
        write_file(&dir.join("summary.csv"), &csv)?;
        let json = SummaryJson {
            base_seed: args.seed,
            runs: args.runs,
            seed_rule: "base_seed + run_index",
            population: args.pop,
            iterations: args.iters,
            acceptance: args.acceptance.to_string(),
            rows: &rows,
        };
        let text = serde_json::to_string_pretty(&json).map_err(runtime_err)? + "\n";
        write_file(&dir.join("summary.json"), &text)?;
    }
    if want_div {
        write_file(&dir.join("diversity.csv"), &div_csv)?;
    }
    if args.emit.contains(&Emit::Pvalues) {
        write_file(&dir.join("pvalues.csv"), &p_csv)?;
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn file_stem(label: &str) -> String {
    label.replace(':', "_d")
}

fn cmd_assign(args: &AssignArgs) -> Result<(), Failure> {
    if args.runs < 1 {
        return Err(config_err("--runs must be at least 1"));
    }
    let matrix = match &args.matrix {
        Some(path) => {
            let file = fs::File::open(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            CostMatrix::from_csv(file).map_err(|e| config_err(format!("{}: {e}", path.display())))?
        }
        None => CostMatrix::call_center(),
    };
    let config = base_config(args.algorithm, args.pop, args.iters, args.acceptance);
    config.validate().map_err(config_err)?;
    let n = matrix.n();
    let oracle = if n <= BRUTE_FORCE_LIMIT {
        Some(brute_force(&matrix).map_err(runtime_err)?)
    } else {
        None
    };

    let dir = out_dir(&args.out);
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    let mut runs_csv = seed_header(args.seed, args.runs);
    runs_csv.push_str("seed,total_seconds,gap_seconds\n");
    let mut best: Option<(crate::assignment::Assignment, u64)> = None;
    let started = Instant::now();
    for run in 0..args.runs {
        let mut cfg = config.clone();
        cfg.objective = "assignment".into();
        cfg.seed = args.seed.wrapping_add(run as u64);
        let (assignment, result) = optimize_assignment(&matrix, &cfg).map_err(runtime_err)?;
        let path = dir.join(format!("assign_history_{}_seed{}.csv", args.algorithm, cfg.seed));
        let mut buf = Vec::new();
        result.write_csv(&mut buf).map_err(|e| io_err(&path, e))?;
        fs::write(&path, buf).map_err(|e| io_err(&path, e))?;
        let gap = oracle.as_ref().map(|o| assignment.total_seconds - o.total_seconds);
        let _ = writeln!(runs_csv, "{},{},{}", cfg.seed, assignment.total_seconds, gap.map(|g| g.to_string()).unwrap_or_default());
        if best.as_ref().is_none_or(|(b, _)| assignment.total_seconds < b.total_seconds) {
            best = Some((assignment, cfg.seed));
        }
    }
    let (best, best_seed) = best.expect("at least one run");
    write_file(&dir.join("assign_runs.csv"), &runs_csv)?;
    let path = dir.join("assignment.csv");
    let mut buf = Vec::new();
    best.write_csv(&matrix, &mut buf).map_err(|e| io_err(&path, e))?;
    fs::write(&path, buf).map_err(|e| io_err(&path, e))?;

    let per_call = call_handle_time(&CallTimeBreakdown {
        hold_seconds: 0.0,
        call_seconds: best.total_seconds,
        post_call_seconds: 0.0,
        total_calls: n as u64,
    })
    .map_err(runtime_err)?;
    println!("{} on {n}x{n} matrix, {} run(s), best from seed {best_seed}", args.algorithm, args.runs);
    for (caller, &agent) in best.perm.iter().enumerate() {
        println!(
            "  {} -> {} ({} s)",
            matrix.callers()[caller],
            matrix.agents()[agent],
            matrix.get(caller, agent)
        );
    }
    println!("achieved total: {} s", best.total_seconds);
    match &oracle {
        Some(o) => println!(
            "oracle total:   {} s (gap {} s)",
            o.total_seconds,
            best.total_seconds - o.total_seconds
        ),
        None => println!("oracle total:   skipped (n > {BRUTE_FORCE_LIMIT})"),
    }
    println!(
        "handle time:    {per_call} s per call ({}m {:02}s)",
        (per_call / 60.0).floor(),
        (per_call % 60.0).round()
    );
    println!("elapsed:        {:.3} s", started.elapsed().as_secs_f64());
    println!("wrote {}", dir.display());
    Ok(())
}

#[derive(Serialize)]
struct ListRow {
    name: String,
    alias: String,
    dimension_rule: String,
    dimension: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    known_min: Option<f64>,
}

fn bounds_text(lower: &[f64], upper: &[f64]) -> String {
    let uniform = lower.iter().all(|&l| l == lower[0]) && upper.iter().all(|&u| u == upper[0]);
    if uniform {
        format!("[{}, {}]^{}", lower[0], upper[0], lower.len())
    } else {
        lower
            .iter()
            .zip(upper)
            .map(|(l, u)| format!("[{l}, {u}]"))
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

fn cmd_list(json: bool) -> Result<(), Failure> {
    let registry = Registry::standard();
    let rows: Vec<ListRow> = registry
        .entries()
        .iter()
        .map(|entry| {
            let spec = entry.default_spec();
            ListRow {
                name: entry.name.clone(),
                alias: entry.alias.clone(),
                dimension_rule: entry.rule.to_string(),
                dimension: spec.dimension(),
                lower: spec.bounds().lower().to_vec(),
                upper: spec.bounds().upper().to_vec(),
                known_min: spec.known_min(),
            }
        })
        .collect();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let res = if json {
        serde_json::to_string_pretty(&rows)
            .map_err(runtime_err)
            .and_then(|s| writeln!(out, "{s}").or_else(ignore_broken_pipe))
    } else {
        let mut text = format!("{:<5} {:<16} {:<22} {:<26} {}\n", "name", "alias", "dimension", "bounds", "known_min");
        for r in &rows {
            let _ = writeln!(
                text,
                "{:<5} {:<16} {:<22} {:<26} {}",
                r.name,
                r.alias,
                r.dimension_rule,
                bounds_text(&r.lower, &r.upper),
                r.known_min.map(|m| format!("{m:e}")).unwrap_or_else(|| "-".into())
            );
        }
        out.write_all(text.as_bytes()).or_else(ignore_broken_pipe)
    };
    res
}

fn ignore_broken_pipe(e: io::Error) -> Result<(), Failure> {
    match e.kind() {
        io::ErrorKind::BrokenPipe => Ok(()),
        _ => Err(runtime_err(e)),
    }
}

/// Reads two columns of numbers. Empty cells are skipped so the samples may
/// differ in length; a non-numeric first row is taken as a header.
fn read_two_columns(path: &Path) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let line = record.position().map(|p| p.line()).unwrap_or(i as u64 + 1);
        if record.len() != 2 {
            return Err(config_err(format!(
                "{} line {line}: expected 2 columns, found {}",
                path.display(),
                record.len()
            )));
        }
        let parsed: Vec<Option<Result<f64, _>>> = record
            .iter()
            .map(|c| (!c.is_empty()).then(|| c.parse::<f64>()))
            .collect();
        if i == 0 && parsed.iter().any(|p| matches!(p, Some(Err(_)))) {
            continue;
        }
        for (col, (cell, dst)) in parsed.into_iter().zip([&mut a, &mut b]).enumerate() {
            match cell {
                Some(Ok(v)) => dst.push(v),
                Some(Err(_)) => {
                    return Err(config_err(format!(
                        "{} line {line}, column {}: not a number",
                        path.display(),
                        col + 1
                    )))
                }
                None => {}
            }
        }
    }
    Ok((a, b))
}

fn cmd_wilcoxon(path: &Path) -> Result<(), Failure> {
    let (a, b) = read_two_columns(path)?;
    let outcome = rank_sum_test(&a, &b).map_err(config_err)?;
    let method = match outcome.method {
        RankSumMethod::Exact => "exact",
        RankSumMethod::Normal => "normal",
    };
    eprintln!("n1={} n2={} W={} method={method}", a.len(), b.len(), outcome.statistic);
    println!("{}", outcome.p_value);
    Ok(())
}
