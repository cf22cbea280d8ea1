use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use cbm_core::eigen::{dense_spectrum, dense_symmetric_eigenvalues, render_spectrum_svg, write_spectrum_csv, DEFAULT_DENSE_CAP};
use cbm_core::inference::{population_dynamics, PopDynConfig};
use cbm_core::model::{generate, read_instance, write_instance};
use cbm_core::operators::{build_bethe_hessian, build_bprime};
use cbm_core::{detect, CbmInstance, CbmParams, DetectOptions, Method, OperatorBundle, SolverConfig, Spectrum};
use cbm_cli::sweep::{aggregate, alpha_grid, run_trials, write_csv, SweepSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

const EXIT_DETECTION_FAILED: u8 = 2;

#[derive(Parser)]
#[command(name = "cbm", version, about = "Community detection experiments on the censored block model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a planted instance and write it to a file
    Gen(GenArgs),
    /// Run detection methods on an instance file; one JSON line per method
    Detect(DetectArgs),
    /// Mean overlap against alpha for each method, as CSV
    Sweep(SweepArgs),
    /// Dense spectrum of B' (or of the Bethe Hessian) as re,im CSV
    Spectrum(SpectrumArgs),
    /// Asymptotic BP overlap by population dynamics
    Popdyn(PopdynArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone, Copy)]
struct SolverArgs {
    /// Matrix-vector product budget (default depends on the dimension)
    #[arg(long)]
    max_iter: Option<usize>,
    /// Relative residual tolerance
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

impl SolverArgs {
    fn config(&self, seed: u64) -> SolverConfig {
        SolverConfig { tol: self.tol, max_iter: self.max_iter, ..SolverConfig::with_seed(seed) }
    }
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated subset of NB, BH, BP
    #[arg(long, default_value = "NB")]
    methods: String,
    /// Noise level assumed by BP
    #[arg(long)]
    epsilon: Option<f64>,
    /// Seed of solver start vectors and BP initial messages
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    /// Explicit comma-separated alpha grid; overrides --alpha-min/--alpha-max/--alpha-step
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, default_value_t = 3.0)]
    alpha_min: f64,
    #[arg(long, default_value_t = 8.0)]
    alpha_max: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha_step: f64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value = "NB,BH,BP")]
    methods: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (default: all cores)
    #[arg(long, env = "CBM_JOBS")]
    jobs: Option<usize>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Operator {
    /// B' (2n x 2n, non-symmetric)
    #[value(alias = "nb", alias = "bprime")]
    Nonbacktracking,
    /// H(sqrt(alpha)) (n x n, symmetric)
    #[value(alias = "bh")]
    Bethe,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Instance file; otherwise one is generated from --n/--alpha/--epsilon/--seed
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Operator::Nonbacktracking)]
    operator: Operator,
    /// CSV destination (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render an SVG scatter with the sqrt(alpha) circle
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct PopdynArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 10_000)]
    pop_size: usize,
    /// Equilibration sweeps; the same number of measurement sweeps follows
    #[arg(long, default_value_t = 200)]
    sweeps: usize,
    /// Independent replicas
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "CBM_JOBS")]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
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
        Command::Gen(a) => cmd_gen(a),
        Command::Detect(a) => cmd_detect(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Popdyn(a) => cmd_popdyn(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn parse_methods(list: &str) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let m: Method = token.parse()?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        bail!("--methods is empty");
    }
    Ok(methods)
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            bail!("--jobs must be at least 1");
        }
        builder = builder.num_threads(j);
    }
    Ok(builder.build()?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn cmd_gen(a: GenArgs) -> Result<ExitCode> {
    let params = CbmParams::new(a.n, a.alpha, a.epsilon, a.seed)?;
    let instance = generate(&params)?;
    write_instance(&instance, &a.out).with_context(|| format!("cannot write {}", a.out.display()))?;
    println!("n={} m={} empirical_alpha={}", instance.n(), instance.m(), instance.empirical_alpha());
    Ok(ExitCode::SUCCESS)
}

fn cmd_detect(a: DetectArgs) -> Result<ExitCode> {
    let methods = parse_methods(&a.methods)?;
    if methods.contains(&Method::BP) && a.epsilon.is_none() {
        bail!("BP needs --epsilon");
    }
    let instance = read_instance(&a.input)?;
    let options = DetectOptions {
        solver: a.solver.config(a.seed),
        epsilon: a.epsilon,
        bp: cbm_core::inference::BpConfig { seed: a.seed, ..Default::default() },
    };
    let mut all_succeeded = true;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for m in methods {
        let started = Instant::now();
        let outcome = detect(&instance, m, &options)?;
        writeln!(out, "{}", outcome.to_json_line())?;
        if let Some(reason) = &outcome.reason {
            eprintln!("{m}: {reason}");
        }
        eprintln!("{m}: {:.3}s", started.elapsed().as_secs_f64());
        all_succeeded &= outcome.success;
    }
    Ok(if all_succeeded { ExitCode::SUCCESS } else { ExitCode::from(EXIT_DETECTION_FAILED) })
}

fn cmd_sweep(a: SweepArgs) -> Result<ExitCode> {
    let alphas = match &a.alpha {
        Some(list) => list
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| anyhow!("bad alpha {t:?}: {e}")))
            .collect::<Result<Vec<_>>>()?,
        None => alpha_grid(a.alpha_min, a.alpha_max, a.alpha_step)?,
    };
    let mut spec = SweepSpec::new(a.n, a.epsilon, alphas, a.trials, parse_methods(&a.methods)?, a.seed);
    spec.solver = a.solver.config(a.seed);
    spec.validate()?;
    let mut out = create(&a.out)?;

    let started = Instant::now();
    let pool = thread_pool(a.jobs)?;
    let records = pool.install(|| run_trials(&spec))?;
    let rows = aggregate(&records);
    write_csv(&rows, &mut out)?;
    out.flush()?;
    eprintln!(
        "sweep: {} instances x {} methods in {:.1}s on {} threads",
        records.len(),
        spec.methods.len(),
        started.elapsed().as_secs_f64(),
        pool.current_num_threads()
    );
    Ok(ExitCode::SUCCESS)
}

fn spectrum_instance(a: &SpectrumArgs) -> Result<CbmInstance> {
    if let Some(path) = &a.input {
        return Ok(read_instance(path)?);
    }
    let (Some(n), Some(alpha), Some(epsilon)) = (a.n, a.alpha, a.epsilon) else {
        bail!("spectrum needs --in, or --n, --alpha and --epsilon");
    };
    Ok(generate(&CbmParams::new(n, alpha, epsilon, a.seed)?)?)
}

fn cmd_spectrum(a: SpectrumArgs) -> Result<ExitCode> {
    let instance = spectrum_instance(&a)?;
    let bundle = OperatorBundle::new(&instance);
    let radius = instance.empirical_alpha().sqrt();
    let dim = match a.operator {
        Operator::Nonbacktracking => 2 * instance.n(),
        Operator::Bethe => instance.n(),
    };
    if dim > DEFAULT_DENSE_CAP {
        bail!("matrix dimension {dim} exceeds the dense cap {DEFAULT_DENSE_CAP}; use a smaller --n");
    }
    let started = Instant::now();
    let spectrum = match a.operator {
        Operator::Nonbacktracking => dense_spectrum(build_bprime(&bundle).to_dense().as_ref())?,
        Operator::Bethe => Spectrum::from_real(&dense_symmetric_eigenvalues(build_bethe_hessian(&bundle, radius).to_dense().as_ref())?),
    };
    eprintln!("spectrum: {dim}x{dim} in {:.1}s", started.elapsed().as_secs_f64());

    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            write_spectrum_csv(&spectrum, &mut w)?;
            w.flush()?;
        }
        None => write_spectrum_csv(&spectrum, io::stdout().lock())?,
    }
    if let Some(path) = &a.svg {
        std::fs::write(path, render_spectrum_svg(&spectrum, radius)).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if a.operator == Operator::Nonbacktracking {
        let outside = spectrum.outside(radius);
        eprintln!("{} eigenvalue(s) outside radius sqrt(alpha) = {radius:.4}", outside.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_popdyn(a: PopdynArgs) -> Result<ExitCode> {
    if a.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let base = PopDynConfig {
        pop_size: a.pop_size,
        equilibration_sweeps: a.sweeps,
        measurement_sweeps: a.sweeps,
        ..PopDynConfig::new(a.alpha, a.epsilon, a.seed)
    };
    base.validate()?;
    let started = Instant::now();
    let pool = thread_pool(a.jobs)?;
    let estimates: Vec<f64> = pool.install(|| {
        (0..a.trials)
            .into_par_iter()
            .map(|r| {
                let seed = cbm_core::rng::child_seed(a.seed, cbm_core::rng::tag::POPDYN, r as u64);
                population_dynamics(&PopDynConfig { seed, ..base })
            })
            .collect::<cbm_core::Result<Vec<_>>>()
    })?;
    let k = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / k;
    let stderr = if estimates.len() > 1 {
        (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt() / k.sqrt()
    } else {
        0.0
    };
    let report = json!({
        "estimate": mean,
        "stderr": stderr,
        "replicas": estimates,
        "alpha": a.alpha,
        "epsilon": a.epsilon,
        "pop_size": a.pop_size,
        "sweeps": a.sweeps,
        "seed": a.seed,
    });
    let line = serde_json::to_string(&report)?;
    match &a.out {
        Some(path) => std::fs::write(path, format!("{line}\n")).with_context(|| format!("cannot write {}", path.display()))?,
        None => println!("{line}"),
    }
    eprintln!("popdyn: {} replicas in {:.1}s", a.trials, started.elapsed().as_secs_f64());
    Ok(ExitCode::SUCCESS)
}
