mod bench;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cdmaxcut::{
    read_tsplib_file, solve_batch, AlgorithmId, AlphaMode, BetaMode, DistanceConvention, Error, Execution,
    SolveOptions, WeightedGraph,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::report::Record;

const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_NUMERIC: u8 = 4;
const EXIT_GATE: u8 = 5;

#[derive(Parser)]
#[command(name = "maxcut", version, about = "Canonical-dual max-cut solvers for TSPLIB instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve instances and write one record per (instance, algorithm).
    Solve(SolveArgs),
    /// Solve instances and compare against a reference file of published cuts.
    Bench(BenchArgs),
    /// Exact cut by enumeration.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args)]
struct Common {
    /// Comma-separated algorithms: cda1, cda2, cda3, oracle.
    #[arg(long = "alg", value_delimiter = ',', default_value = "cda1,cda2,cda3")]
    algorithms: Vec<String>,
    /// gershgorin or spectral.
    #[arg(long, default_value = "gershgorin")]
    alpha_mode: String,
    /// Slack added to the alpha bound.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// constant or proportional.
    #[arg(long, default_value = "proportional")]
    beta_mode: String,
    #[arg(long, default_value_t = 5000.0)]
    beta_scale: f64,
    /// L1 norm of the linear perturbation used by CDA2 and CDA3.
    #[arg(long, default_value_t = 0.9)]
    linear_s: f64,
    /// Coordinates with ||x_i| - 1| <= tau are fixed during reduction.
    #[arg(long, default_value_t = 0.05)]
    tau: f64,
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = cdmaxcut::DEFAULT_ORACLE_LIMIT)]
    oracle_limit: usize,
    /// planar: rounded Euclidean distance on raw coordinates for every
    /// coordinate type; tsplib: the TSPLIB GEO/ATT formulas.
    #[arg(long, default_value = "planar")]
    distance: String,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    /// TSPLIB files or directories holding *.tsp files.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BenchArgs {
    /// CSV with columns instance,expected_cut,gate[,tolerance].
    #[arg(long)]
    reference: PathBuf,
    /// Directory searched for <instance>.tsp when no paths are given.
    #[arg(long, default_value = "data/tsplib")]
    data_dir: PathBuf,
    /// Instances to run instead of every reference entry.
    paths: Vec<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    #[arg(long, default_value_t = cdmaxcut::DEFAULT_ORACLE_LIMIT)]
    limit: usize,
    #[arg(long, default_value = "planar")]
    distance: String,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure(u8, String);

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

fn options(c: &Common) -> Result<SolveOptions, Failure> {
    let mut o = SolveOptions::default();
    o.policy.alpha_mode = c.alpha_mode.parse::<AlphaMode>().map_err(|e| usage(e.to_string()))?;
    o.policy.alpha_slack = c.delta;
    o.policy.beta_mode = c.beta_mode.parse::<BetaMode>().map_err(|e| usage(e.to_string()))?;
    o.policy.beta_scale = c.beta_scale;
    o.policy.linear_magnitude = c.linear_s;
    o.policy.rng_seed = c.seed;
    o.settings.tau = c.tau;
    o.settings.epsilon = c.eps;
    o.settings.max_iters = c.max_iters;
    o.oracle_limit = c.oracle_limit;
    o.validate().map_err(|e| usage(e.to_string()))?;
    Ok(o)
}

fn algorithms(names: &[String]) -> Result<Vec<AlgorithmId>, Failure> {
    let mut algs = names
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<AlgorithmId>().map_err(|e| usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    algs.sort();
    algs.dedup();
    if algs.is_empty() {
        return Err(usage("no algorithm selected"));
    }
    Ok(algs)
}

fn convention(s: &str) -> Result<DistanceConvention, Failure> {
    s.parse().map_err(|e: Error| usage(e.to_string()))
}

fn expand(paths: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = fs::read_dir(p).map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", p.display())))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "tsp"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        return Err(usage("no instances given"));
    }
    Ok(files)
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn exit_class(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::UnsupportedFormat(_) | Error::Io(_) => EXIT_PARSE,
        _ => EXIT_NUMERIC,
    }
}

/// Loads and solves every instance; records come back ordered by
/// `(instance, algorithm)` with the worst exit class seen.
fn run_all(
    files: &[PathBuf],
    algs: &[AlgorithmId],
    opts: &SolveOptions,
    conv: DistanceConvention,
    jobs: Option<usize>,
) -> Result<(Vec<Record>, u8), Failure> {
    let mut named: Vec<(String, &PathBuf)> = files.iter().map(|f| (instance_name(f), f)).collect();
    named.sort();
    let mut records = Vec::new();
    let mut code = 0u8;
    let mut graphs: Vec<(String, WeightedGraph)> = Vec::new();
    for (name, path) in named {
        match read_tsplib_file(path, conv) {
            Ok(g) => graphs.push((name, g)),
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                code = code.max(EXIT_PARSE);
                records.extend(algs.iter().map(|a| Record::failed(&name, a.as_str(), 0, &e.to_string())));
            }
        }
    }
    let only: Vec<WeightedGraph> = graphs.iter().map(|(_, g)| g.clone()).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| usage(e.to_string()))?;
    let results = pool.install(|| solve_batch(&only, algs, opts, Execution::Parallel));
    for (k, res) in results.into_iter().enumerate() {
        let (name, g) = &graphs[k / algs.len()];
        let alg = algs[k % algs.len()];
        match res {
            Ok(r) => records.push(Record::from_report(name, g.num_vertices(), &r)),
            Err(e) => {
                eprintln!("{name} {alg}: {e}");
                code = code.max(exit_class(&e));
                records.push(Record::failed(name, alg.as_str(), g.num_vertices(), &e.to_string()));
            }
        }
    }
    records.sort_by(|a, b| (&a.instance, &a.algorithm).cmp(&(&b.instance, &b.algorithm)));
    Ok((records, code))
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(records: &[Record], format: Format) -> String {
    match format {
        Format::Json => report::to_json(records),
        Format::Csv => report::to_csv(records),
        Format::Table => report::to_table(records),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<u8, Failure> {
    let algs = algorithms(&args.common.algorithms)?;
    let opts = options(&args.common)?;
    let conv = convention(&args.common.distance)?;
    let files = expand(&args.paths)?;
    let (records, code) = run_all(&files, &algs, &opts, conv, args.common.jobs)?;
    emit(&render(&records, args.common.format), &args.common.out)?;
    Ok(code)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8, Failure> {
    let opts = SolveOptions {
        oracle_limit: args.limit,
        ..SolveOptions::default()
    };
    let conv = convention(&args.distance)?;
    let files = expand(&args.paths)?;
    let (records, code) = run_all(&files, &[AlgorithmId::Oracle], &opts, conv, None)?;
    emit(&render(&records, args.format), &args.out)?;
    Ok(code)
}

fn cmd_bench(args: BenchArgs) -> Result<u8, Failure> {
    if !args.reference.is_file() {
        return Err(usage(format!("reference file {} not found", args.reference.display())));
    }
    let refs = bench::read_reference(&args.reference).map_err(usage)?;
    let algs = algorithms(&args.common.algorithms)?;
    let opts = options(&args.common)?;
    let conv = convention(&args.common.distance)?;
    let files = if args.paths.is_empty() {
        refs.iter().map(|r| args.data_dir.join(format!("{}.tsp", r.instance))).collect()
    } else {
        expand(&args.paths)?
    };
    let (records, code) = run_all(&files, &algs, &opts, conv, args.common.jobs)?;
    let rows = bench::compare(&records, &refs);
    for r in rows.iter().filter(|r| r.status == bench::Status::NoReference && r.algorithm == "BEST") {
        eprintln!("warning: no reference value for {}", r.instance);
    }
    let text = match args.common.format {
        Format::Json => bench::to_json(&rows),
        Format::Csv => bench::to_csv(&rows),
        Format::Table => bench::to_table(&rows),
    };
    emit(&text, &args.common.out)?;
    if code != 0 {
        return Ok(code);
    }
    Ok(if bench::gate_passed(&rows) { 0 } else { EXIT_GATE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
