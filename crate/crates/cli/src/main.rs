//! `lsxgc`: simulate benchmark data, infer directed networks and compare
//! estimators from the command line.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 estimator error.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lsxgc_core::data::{load_ensemble_csv, MatrixFormat, Orientation};
use lsxgc_core::evaluation::run_benchmark_with;
use lsxgc_core::parallel::with_jobs;
use lsxgc_core::simulator::{read_dataset, simulate_dataset_with, write_dataset};
use lsxgc_core::{Error, Execution, Method};

use config::CliConfig;

#[derive(Parser)]
#[command(name = "lsxgc", version, about = "Directed network inference for multivariate time-series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic fMRI-like realizations with known ground truth.
    Simulate(SimulateArgs),
    /// Estimate causality matrices for one ensemble CSV.
    Analyze(AnalyzeArgs),
    /// Score estimators against ground truth over a dataset.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Common {
    /// JSON file with `simulation`, `analysis`, `methods`, ... sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulationFlags {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Output samples per realization.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long = "snr-db")]
    snr_db: Option<f64>,
    /// Skip measurement noise.
    #[arg(long)]
    noiseless: bool,
}

#[derive(Args)]
struct AnalysisFlags {
    /// Principal components for lsXGC.
    #[arg(long)]
    p: Option<usize>,
    /// Lag order.
    #[arg(long)]
    m: Option<usize>,
    /// Neighbours for the k-NN estimators.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    ridge: Option<f64>,
    #[arg(long = "mi-lag")]
    mi_lag: Option<usize>,
    /// Skip z-scoring of the input series.
    #[arg(long = "no-standardize")]
    no_standardize: bool,
    /// Comma-separated subset of lsxgc, gc, te, mi, or `all`.
    #[arg(long, visible_alias = "methods")]
    method: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    sim: SimulationFlags,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    analysis: AnalysisFlags,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, value_enum)]
    orientation: Option<OrientationArg>,
    /// Ensemble CSV.
    input: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    analysis: AnalysisFlags,
    /// Simulation settings, used when no `--data` directory is given.
    #[command(flatten)]
    sim: SimulationFlags,
    /// Dataset directory written by `simulate`.
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    RowsAreTime,
    RowsAreNodes,
}

/// Error surfaced to the user with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(e: impl std::fmt::Display) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }

    fn estimator(e: Error) -> Self {
        Failure {
            code: if e.is_estimator_error() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

fn base_config(common: &Common) -> std::result::Result<CliConfig, Failure> {
    let mut cfg = CliConfig::load(common.config.as_deref()).map_err(Failure::config)?;
    if let Some(j) = common.jobs {
        cfg.jobs = j;
    }
    if let Some(o) = &common.out {
        cfg.out = Some(o.clone());
    }
    Ok(cfg)
}

fn apply_simulation(cfg: &mut CliConfig, f: &SimulationFlags) {
    let s = &mut cfg.simulation;
    s.seed = f.seed.unwrap_or(s.seed);
    s.n_nodes = f.nodes.unwrap_or(s.n_nodes);
    s.n_realizations = f.realizations.unwrap_or(s.n_realizations);
    s.t_samples = f.samples.unwrap_or(s.t_samples);
    s.edge_density = f.density.unwrap_or(s.edge_density);
    s.snr_db = f.snr_db.unwrap_or(s.snr_db);
    s.noiseless |= f.noiseless;
}

fn apply_analysis(cfg: &mut CliConfig, f: &AnalysisFlags) -> CliResult {
    let a = &mut cfg.analysis;
    a.p = f.p.unwrap_or(a.p);
    a.m = f.m.unwrap_or(a.m);
    a.k = f.k.unwrap_or(a.k);
    a.ridge = f.ridge.unwrap_or(a.ridge);
    a.mi_lag = f.mi_lag.unwrap_or(a.mi_lag);
    a.standardize &= !f.no_standardize;
    if let Some(list) = &f.method {
        cfg.methods = Method::parse_list(list).map_err(Failure::config)?;
    }
    cfg.analysis.validate().map_err(Failure::config)
}

fn out_dir(cfg: &CliConfig) -> std::result::Result<PathBuf, Failure> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Failure::config(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn simulate(args: SimulateArgs) -> CliResult {
    let mut cfg = base_config(&args.common)?;
    apply_simulation(&mut cfg, &args.sim);
    cfg.simulation.validate().map_err(Failure::config)?;
    let dir = out_dir(&cfg)?;
    let data = with_jobs(cfg.jobs, || simulate_dataset_with(&cfg.simulation, Execution::default()))
        .map_err(Failure::estimator)?;
    write_dataset(&dir, &cfg.simulation, &data).map_err(Failure::config)?;
    println!(
        "wrote {} realizations ({} nodes × {} samples) to {}",
        data.len(),
        cfg.simulation.n_nodes,
        cfg.simulation.t_samples,
        dir.display()
    );
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> CliResult {
    let mut cfg = base_config(&args.common)?;
    apply_analysis(&mut cfg, &args.analysis)?;
    if let Some(f) = args.format {
        cfg.format = Some(match f {
            FormatArg::Csv => MatrixFormat::Csv,
            FormatArg::Json => MatrixFormat::Json,
        });
    }
    if let Some(o) = args.orientation {
        cfg.orientation = Some(match o {
            OrientationArg::RowsAreTime => Orientation::RowsAreTime,
            OrientationArg::RowsAreNodes => Orientation::RowsAreNodes,
        });
    }
    let input = args
        .input
        .or(cfg.data.clone())
        .ok_or_else(|| Failure::config("no input file given"))?;
    let ens = load_ensemble_csv(&input, cfg.orientation.unwrap_or(Orientation::RowsAreTime)).map_err(Failure::config)?;
    let format = cfg.format.unwrap_or(MatrixFormat::Csv);
    let dir = out_dir(&cfg)?;
    for method in cfg.methods_or(&[Method::Lsxgc]) {
        let matrix = with_jobs(cfg.jobs, || method.estimate(&ens, &cfg.analysis, Execution::default()))
            .map_err(Failure::estimator)?;
        let path = dir.join(format!("{method}.{}", format.extension()));
        matrix.save(&path, format).map_err(Failure::config)?;
        println!("{method}: wrote {}", path.display());
    }
    Ok(())
}

fn bench(args: BenchArgs) -> CliResult {
    let mut cfg = base_config(&args.common)?;
    apply_analysis(&mut cfg, &args.analysis)?;
    apply_simulation(&mut cfg, &args.sim);
    if let Some(d) = args.data {
        cfg.data = Some(d);
    }
    let (simulation, dataset) = match &cfg.data {
        Some(dir) => {
            let (manifest, data) = read_dataset(dir).map_err(Failure::config)?;
            (manifest.map(|m| m.config), data)
        }
        None => {
            cfg.simulation.validate().map_err(Failure::config)?;
            let data = with_jobs(cfg.jobs, || simulate_dataset_with(&cfg.simulation, Execution::default()))
                .map_err(Failure::estimator)?;
            (Some(cfg.simulation.clone()), data)
        }
    };
    let methods = cfg.methods_or(&Method::ALL);
    let mut report = with_jobs(cfg.jobs, || {
        run_benchmark_with(&dataset, &methods, &cfg.analysis, Execution::default())
    })
    .map_err(Failure::estimator)?;
    report.config.simulation = simulation;

    let dir = out_dir(&cfg)?;
    let json = serde_json::to_string_pretty(&report).map_err(Failure::config)?;
    write(&dir.join("report.json"), json + "\n")?;
    write(&dir.join("report.txt"), report.text_table())?;
    for line in report.summary_lines() {
        println!("{line}");
    }
    match report.methods.iter().find(|r| !r.succeeded()) {
        Some(r) => Err(Failure {
            code: 2,
            message: format!("{} failed on {}", r.name, r.error.as_deref().unwrap_or("a realization")),
        }),
        None => Ok(()),
    }
}

fn write(path: &Path, contents: String) -> CliResult {
    fs::write(path, contents).map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Analyze(a) => analyze(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
