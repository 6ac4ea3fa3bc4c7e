//! `priorpost`: sample posteriors from prior draws, diagnose weight quality,
//! and run the reference benchmarks.
//!
//! Exit status: 0 on success, 1 for usage or configuration errors, 2 when
//! the computation itself fails (for example every likelihood underflows).

mod registry;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use priorpost::diagnostics::{d2_hat, ess, ks_distance, DiagnosticsReport};
use priorpost::engine::{default_shards, run_sharded_stream};
use priorpost::io::{write_sample, Format, RunManifest, Sample};
use priorpost::rng::{RESAMPLE, SWEEP};
use priorpost::{amplify, normalize_weights, resample, weigh, Error, EmpiricalMeasure, Model, RngStream, DEFAULT_COPY_CAP};

#[derive(Parser)]
#[command(name = "priorpost", version, about = "Posterior approximation by likelihood-weighted prior sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a posterior sample and write it with a run manifest.
    Sample(SampleArgs),
    /// Print ESS, plug-in D2, the variance bound and per-set variances as JSON.
    Diagnose(DiagnoseArgs),
    /// Reproduce a reference experiment as CSV.
    #[command(long_about = "Reproduce a reference experiment as CSV.\n\n\
Columns: grid_point (n for fig1/fig2, t for sweep), ks (distance of the sample to the \
exact posterior CDF), ess, d2_hat, exp_d2_hat, wall_time_s.\n\n\
fig1: one N(theta, 1) observation x = 1, N(0, 1) prior, SLIPS with m = n.\n\
fig2: 10^4 observations with mean 1, same prior, SLIPS with m = n.\n\
sweep: LIPS on the fig2 family over t at fixed n.")]
    Benchmark(BenchmarkArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Model id: gaussian-gaussian, beta-bernoulli, flat-gaussian, constant, gaussian-chain.
    #[arg(long)]
    model: String,
    /// Model parameter as key=value; repeatable.
    #[arg(short = 'p', long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Observed value (xbar for the Gaussian models, x for gaussian-chain).
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Lips,
    Laps,
    Slips,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FileFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    /// Number of prior draws.
    #[arg(long)]
    n: usize,
    /// Resample size for slips (default n).
    #[arg(long)]
    m: Option<usize>,
    /// Amplification for laps (default 100).
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker shards (default: the worker cap). Does not change the output.
    #[arg(long)]
    shards: Option<usize>,
    #[arg(long)]
    output: PathBuf,
    /// Output format (default: from the file extension, else csv).
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    shards: Option<usize>,
    /// Report the asymptotic variance for (-inf, A] on the first coordinate; repeatable.
    #[arg(long = "half-line", value_name = "A", allow_negative_numbers = true)]
    half_lines: Vec<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Figure {
    Fig1,
    Fig2,
    Sweep,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(value_enum)]
    figure: Figure,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample sizes for fig1/fig2 (default 1e4,1e5 and 1e5,1e6); the single n for sweep (default 1e6).
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Information levels for sweep.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
    t: Vec<u64>,
    #[arg(long)]
    shards: Option<usize>,
    /// Write 0 in the wall_time_s column so that output is reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Diagnose(a) => cmd_diagnose(a),
        Command::Benchmark(a) => cmd_benchmark(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn build_model(args: &ModelArgs) -> Result<(Box<dyn Model>, serde_json::Value), Failure> {
    let params = registry::parse_params(&args.params).map_err(Failure::Usage)?;
    let (model, used) = registry::build(&args.model, params, args.x).map_err(Failure::Usage)?;
    Ok((model, json!({ "id": args.model, "params": used })))
}

fn shard_count(shards: Option<usize>) -> Result<usize, Failure> {
    match shards {
        Some(0) => Err(Failure::Usage("--shards must be at least 1".into())),
        Some(k) => Ok(k),
        None => Ok(default_shards()),
    }
}

fn positive(name: &str, v: usize) -> Result<usize, Failure> {
    if v == 0 {
        Err(Failure::Usage(format!("--{name} must be at least 1")))
    } else {
        Ok(v)
    }
}

fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn cmd_sample(a: SampleArgs) -> Outcome {
    let n = positive("n", a.n)?;
    if a.m.is_some() && a.algorithm != Algorithm::Slips {
        return Err(Failure::Usage("--m applies only to --algorithm slips".into()));
    }
    if a.c.is_some() && a.algorithm != Algorithm::Laps {
        return Err(Failure::Usage("--c applies only to --algorithm laps".into()));
    }
    let m = positive("m", a.m.unwrap_or(n))?;
    let c = a.c.unwrap_or(100.0);
    if !(c.is_finite() && c > 0.0) {
        return Err(Failure::Usage(format!("--c must be positive, got {c}")));
    }
    let shards = shard_count(a.shards)?;
    let format = match a.format {
        Some(FileFormat::Csv) => Format::Csv,
        Some(FileFormat::Json) => Format::Json,
        None => Format::from_path(&a.output).unwrap_or(Format::Csv),
    };
    let (model, model_json) = build_model(&a.model)?;

    let rng = RngStream::new(a.seed);
    let (draws, ll) = run_sharded_stream(model.as_ref(), n, shards, &rng)?;
    let (sample, algorithm) = match a.algorithm {
        Algorithm::Lips => (Sample::from(weigh(draws, &ll)?), json!({ "name": "lips" })),
        Algorithm::Laps => (
            Sample::from(amplify(&draws, &ll, c, DEFAULT_COPY_CAP)?),
            json!({ "name": "laps", "c": c }),
        ),
        Algorithm::Slips => {
            let weighted = weigh(draws, &ll)?;
            (
                Sample::from(resample(&weighted, m, &rng.child(RESAMPLE))?),
                json!({ "name": "slips", "m": m }),
            )
        }
    };
    write_sample(&a.output, &sample, format)?;

    let mut manifest = RunManifest::new(
        a.seed,
        json!({
            "command": "sample",
            "model": model_json,
            "algorithm": algorithm,
            "n": n,
            "format": format,
            "output": a.output.file_name().map(|f| f.to_string_lossy().into_owned()),
        }),
    );
    manifest.timestamp = Some(timestamp());
    manifest.write(&manifest_path(&a.output))?;
    Ok(())
}

fn timestamp() -> String {
    let d = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    format!("{}.{:03}", d.as_secs(), d.subsec_millis())
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_diagnose(a: DiagnoseArgs) -> Outcome {
    let n = positive("n", a.n)?;
    let shards = shard_count(a.shards)?;
    let (model, _) = build_model(&a.model)?;
    let (draws, ll) = run_sharded_stream(model.as_ref(), n, shards, &RngStream::new(a.seed))?;
    let sets: Vec<(String, Vec<bool>)> = a
        .half_lines
        .iter()
        .map(|&cut| (format!("(-inf, {cut}]"), draws.iter().map(|t| t[0] <= cut).collect()))
        .collect();
    let mut report = DiagnosticsReport::from_log_likelihoods(&ll, &sets)?;
    if model.posterior_cdf(0, 0.0).is_some() {
        let post = weigh(draws, &ll)?;
        report = report.with_ks(ks_distance(&post, |x| model.posterior_cdf(0, x).unwrap_or(f64::NAN), 0));
    }
    let mut out = open_output(a.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

struct Row {
    grid_point: f64,
    ks: f64,
    ess: f64,
    d2_hat: f64,
    wall_time_s: f64,
}

fn cmd_benchmark(a: BenchmarkArgs) -> Outcome {
    let shards = shard_count(a.shards)?;
    let root = RngStream::new(a.seed);
    let gaussian = |t: u64| {
        priorpost::models::GaussianGaussian::new(0.0, 1.0, 1.0, t, 1.0).map_err(Failure::from)
    };
    let mut rows = Vec::new();
    match a.figure {
        Figure::Fig1 | Figure::Fig2 => {
            let (t, default_n) = if a.figure == Figure::Fig1 {
                (1, vec![10_000, 100_000])
            } else {
                (10_000, vec![100_000, 1_000_000])
            };
            let model = gaussian(t)?;
            let grid = if a.n.is_empty() { default_n } else { a.n.clone() };
            for (i, &n) in grid.iter().enumerate() {
                let n = positive("n", n)?;
                let rng = root.child(i as u64);
                let start = Instant::now();
                let (draws, ll) = run_sharded_stream(&model, n, shards, &rng)?;
                let weighted = weigh(draws, &ll)?;
                let post = resample(&weighted, n, &rng.child(RESAMPLE))?;
                let wall = start.elapsed().as_secs_f64();
                rows.push(summarise(n as f64, &post, &model, &ll, wall)?);
            }
        }
        Figure::Sweep => {
            let n = match a.n.as_slice() {
                [] => 1_000_000,
                [n] => positive("n", *n)?,
                _ => return Err(Failure::Usage("sweep takes a single --n".into())),
            };
            if a.t.is_empty() || a.t.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Failure::Usage("--t must be strictly increasing".into()));
            }
            let base = root.child(SWEEP);
            for (i, &t) in a.t.iter().enumerate() {
                let model = gaussian(t)?;
                let start = Instant::now();
                let (draws, ll) = run_sharded_stream(&model, n, shards, &base.child(i as u64))?;
                let post = weigh(draws, &ll)?;
                let wall = start.elapsed().as_secs_f64();
                rows.push(summarise(t as f64, &post, &model, &ll, wall)?);
            }
        }
    }
    let mut out = open_output(a.output.as_deref())?;
    writeln!(out, "grid_point,ks,ess,d2_hat,exp_d2_hat,wall_time_s")?;
    for r in rows {
        let wall = if a.no_timing { 0.0 } else { r.wall_time_s };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.grid_point,
            r.ks,
            r.ess,
            r.d2_hat,
            r.d2_hat.exp(),
            wall
        )?;
    }
    out.flush()?;
    Ok(())
}

fn summarise<P: EmpiricalMeasure, M: Model>(
    grid_point: f64,
    post: &P,
    model: &M,
    ll: &priorpost::LogLikelihoods,
    wall_time_s: f64,
) -> Result<Row, Failure> {
    let weights = normalize_weights(ll)?.weights;
    Ok(Row {
        grid_point,
        ks: ks_distance(post, |x| model.posterior_cdf(0, x).unwrap_or(f64::NAN), 0),
        ess: ess(&weights),
        d2_hat: d2_hat(ll)?,
        wall_time_s,
    })
}
