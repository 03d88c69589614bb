use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use robust_lingam::discovery::{discover, to_dot};
use robust_lingam::harness::{
    benchmark, run_outlier_grid, run_simulation, with_threads, ExperimentReport, OutlierGridSettings,
    SimulationSettings,
};
use robust_lingam::{DataMatrix, DiscoveryConfig, Error, KbiConfig, Measure, NoiseDistribution, SlopeEstimator};

const THREADS_ENV: &str = "RLINGAM_THREADS";

#[derive(Parser)]
#[command(name = "rlingam", version, about = "Robust DirectLiNGAM causal discovery")]
struct Cli {
    /// JSON file with default values for any flag; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (0 = all cores). Also read from RLINGAM_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the causal order and connection matrix of a CSV file.
    Discover(DiscoverArgs),
    /// Recovery rates on random models.
    Simulate(SimArgs),
    /// Recovery of the bivariate chain under a single outlier.
    OutlierGrid(GridArgs),
    /// Timings of a simulation sweep.
    Benchmark(SimArgs),
}

#[derive(Args)]
struct DiscoverArgs {
    input: PathBuf,
    #[arg(long)]
    slope: Option<String>,
    #[arg(long)]
    measure: Option<String>,
    #[arg(long)]
    no_prune: bool,
    /// Output directory (default: next to the input).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    q: Option<f64>,
    /// t5, t:2.5, lognormal, pareto, exponential, ...
    #[arg(long)]
    noise: Option<String>,
    /// Comma-separated method labels such as ts-kbi,ols-kbi.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    exponents: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

/// Values a config file may provide.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    threads: Option<usize>,
    slope: Option<String>,
    measure: Option<String>,
    prune: Option<bool>,
    kbi: Option<KbiConfig>,
    lasso_gamma: Option<f64>,
    lasso_lambda_grid: Option<Vec<f64>>,
    out: Option<PathBuf>,
    p: Option<usize>,
    n: Option<Vec<usize>>,
    q: Option<f64>,
    noise: Option<String>,
    methods: Option<Vec<String>>,
    reps: Option<usize>,
    seed: Option<u64>,
    exponents: Option<Vec<u32>>,
    grid_n: Option<usize>,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, Error> {
    match path {
        Some(p) => Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?),
        None => Ok(FileConfig::default()),
    }
}

fn threads(flag: Option<usize>, file: &FileConfig) -> Result<usize, Error> {
    if let Some(t) = flag {
        return Ok(t);
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        return v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("{THREADS_ENV}='{v}' is not a count")));
    }
    Ok(file.threads.unwrap_or(0))
}

fn methods(labels: &[String], file: &FileConfig) -> Result<Vec<DiscoveryConfig>, Error> {
    labels
        .iter()
        .map(|l| {
            let mut cfg = DiscoveryConfig::from_label(l)?;
            cfg.kbi = file.kbi;
            Ok(cfg)
        })
        .collect()
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn simulation_settings(a: &SimArgs, file: &FileConfig) -> Result<SimulationSettings, Error> {
    let noise = a.noise.clone().or_else(|| file.noise.clone()).unwrap_or_else(|| "t5".into());
    let labels = a
        .methods
        .clone()
        .or_else(|| file.methods.clone())
        .unwrap_or_else(|| strings(&["ts-kbi", "ols-kbi"]));
    Ok(SimulationSettings {
        p: a.p.or(file.p).unwrap_or(2),
        sample_sizes: a.n.clone().or_else(|| file.n.clone()).unwrap_or_else(|| vec![100]),
        q: a.q.or(file.q).unwrap_or(1.0),
        noise: NoiseDistribution::parse(&noise)?,
        methods: methods(&labels, file)?,
        replications: a.reps.or(file.reps).unwrap_or(100),
        master_seed: a.seed.or(file.seed).unwrap_or(0),
    })
}

fn grid_settings(a: &GridArgs, file: &FileConfig) -> Result<OutlierGridSettings, Error> {
    let labels = a
        .methods
        .clone()
        .or_else(|| file.methods.clone())
        .unwrap_or_else(|| strings(&["ols-kbi", "ts-kbi", "rm-kbi"]));
    Ok(OutlierGridSettings::new(
        a.n.or(file.grid_n).unwrap_or(500),
        a.exponents
            .clone()
            .or_else(|| file.exponents.clone())
            .unwrap_or_else(|| (0..=10).collect()),
        methods(&labels, file)?,
        a.reps.or(file.reps).unwrap_or(100),
        a.seed.or(file.seed).unwrap_or(0),
    ))
}

fn emit(report: &ExperimentReport, format: Format, out: Option<&Path>) -> Result<(), Error> {
    if let Some(path) = out {
        std::fs::write(path, serde_json::to_string_pretty(report)? + "\n")?;
    }
    match format {
        Format::Text => print!("{}", report.to_text_table()),
        Format::Csv => print!("{}", report.to_csv()),
        Format::Json => println!("{}", serde_json::to_string_pretty(report)?),
    }
    Ok(())
}

fn run_discover(a: &DiscoverArgs, file: &FileConfig) -> Result<(), Error> {
    let data = DataMatrix::read_csv_path(&a.input)?;
    if data.p() < 2 {
        return Err(Error::InvalidInput("need at least 2 columns".into()));
    }
    let tag = |flag: &Option<String>, f: &Option<String>, default: &str| {
        flag.clone().or_else(|| f.clone()).unwrap_or_else(|| default.to_string())
    };
    let slope_tag = tag(&a.slope, &file.slope, "ts");
    let measure_tag = tag(&a.measure, &file.measure, "kbi");
    let slope = SlopeEstimator::from_tag(&slope_tag)
        .ok_or_else(|| Error::InvalidInput(format!("unknown slope '{slope_tag}'")))?;
    let measure = Measure::from_tag(&measure_tag)
        .ok_or_else(|| Error::InvalidInput(format!("unknown measure '{measure_tag}'")))?;
    let mut cfg = DiscoveryConfig::new(slope, measure);
    cfg.kbi = file.kbi;
    cfg.prune = !a.no_prune && file.prune.unwrap_or(true);
    if let Some(g) = file.lasso_gamma {
        cfg.lasso_gamma = g;
    }
    cfg.lasso_lambda_grid = file.lasso_lambda_grid.clone();

    let result = discover(&data, &cfg)?;
    let dir = match a.out.clone().or_else(|| file.out.clone()) {
        Some(d) => d,
        None => a.input.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    std::fs::create_dir_all(&dir)?;
    let stem = a.input.file_stem().and_then(|s| s.to_str()).unwrap_or("data");
    let json_path = dir.join(format!("{stem}.result.json"));
    let dot_path = dir.join(format!("{stem}.dot"));
    std::fs::write(&json_path, serde_json::to_string_pretty(&result)? + "\n")?;
    std::fs::write(&dot_path, to_dot(&result.b, data.names()))?;
    let order: Vec<String> = result.ordering.as_slice().iter().map(|&j| data.name(j)).collect();
    println!("order: {}", order.join(" -> "));
    println!("wrote {} and {}", json_path.display(), dot_path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let file = load_config(cli.config.as_deref())?;
    let threads = threads(cli.threads, &file)?;
    match &cli.command {
        Command::Discover(a) => with_threads(threads, || run_discover(a, &file))?,
        Command::Simulate(a) => {
            let s = simulation_settings(a, &file)?;
            let report = with_threads(threads, || run_simulation(&s))??;
            emit(&report, a.format, a.out.as_deref())
        }
        Command::Benchmark(a) => {
            let s = simulation_settings(a, &file)?;
            let report = with_threads(threads, || benchmark(&s))??;
            emit(&report, a.format, a.out.as_deref())
        }
        Command::OutlierGrid(a) => {
            let s = grid_settings(a, &file)?;
            let report = with_threads(threads, || run_outlier_grid(&s))??;
            emit(&report, a.format, a.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numeric() { 3 } else { 2 })
        }
    }
}
