//! Command-line driver: `gen`, `fit`, `eval`, `fig1`, `rate`, `feature`
//! and `root`.
//!
//! Exit codes: 0 on success, 2 on a usage error (bad option, bad value or an
//! out-of-domain setting), 1 when a run fails.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::datagen::{make_generator, metadata_line, read_csv, sample, write_csv, Dataset};
use crate::error::{Error, Result};
use crate::experiments::{
    feature_study, fig1_study, rate_study_with, write_feature_csv, write_fig1_csv, write_rate_csv,
    FeatureStudyConfig, LambdaSchedule, RateOptions,
};
use crate::margin::LossId;
use crate::model::{parse_model, serialize_model, KernelId, Penalty};
use crate::oracle::{generalization_error, quartic_residual, quartic_root, ExampleSpec, Reference};
use crate::solver::{
    fit, FitConfig, DEFAULT_DC_MAX_OUTER, DEFAULT_MAX_ITERS, DEFAULT_REL_TOL, DEFAULT_STEP0,
};

#[derive(Parser, Debug)]
#[command(
    name = "multimargin",
    version,
    about = "Multi-class large-margin classification studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a sample from a world and write it as CSV
    Gen(GenArgs),
    /// Fit a classifier and write the model; prints its exact GE
    Fit(FitArgs),
    /// Evaluate a saved model's exact GE
    Eval(EvalArgs),
    /// Ideal regrets of the four binary losses over a theta2 grid
    Fig1(Fig1Args),
    /// Empirical convergence rate of the regret
    Rate(RateArgs),
    /// Feature selection with many redundant inputs
    Feature(FeatureArgs),
    /// Largest negative root of the planar-world quartic
    Root(RootArgs),
}

#[derive(Args, Debug, Clone)]
struct WorldArgs {
    /// World: ex51, ex52, ex53 or ex54
    #[arg(long, default_value = "ex51")]
    example: String,
    /// ex51: P(class 1 | x > 0)
    #[arg(long, default_value_t = 0.75)]
    theta1: f64,
    /// ex51: P(class 1 | x <= 0)
    #[arg(long, default_value_t = 0.125)]
    theta2: f64,
    /// ex51/ex52: density exponent
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// ex52: probability of the quadrant's own class
    #[arg(long, default_value_t = 0.7)]
    theta: f64,
    /// ex53: Sobolev order of the spline kernel
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// ex54: P(class 1 | x1 > 0)
    #[arg(long, default_value_t = 0.8)]
    tau: f64,
    /// ex54: input dimension
    #[arg(long, default_value_t = 200)]
    p: usize,
}

impl WorldArgs {
    fn spec(&self) -> Result<ExampleSpec> {
        match self.example.as_str() {
            "ex51" => ExampleSpec::ex51(self.theta1, self.theta2, self.gamma),
            "ex52" => ExampleSpec::ex52(self.theta, self.gamma),
            "ex53" => ExampleSpec::ex53(self.m),
            "ex54" => ExampleSpec::ex54(self.tau, self.p),
            other => Err(Error::Domain(format!("--example: unknown world `{other}`"))),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Loss: logit, svm1, svm2, svm3, psi, l2min, exp, blogit, hinge, bpsi
    #[arg(long)]
    loss: LossId,
    /// Penalty: sql2, l1, enet:<theta> or rkhs [default: rkhs with a kernel, sql2 otherwise]
    #[arg(long)]
    penalty: Option<Penalty>,
    /// Kernel of the RKHS expansion: splinew1, splinew2 or linear [default: the spline of order --m for ex53, none otherwise]
    #[arg(long)]
    kernel: Option<KernelId>,
    /// Fit per-class intercepts (linear rules)
    #[arg(long)]
    intercept: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[arg(long, default_value_t = DEFAULT_DC_MAX_OUTER)]
    dc_max_outer: usize,
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    rel_tol: f64,
    #[arg(long, default_value_t = DEFAULT_STEP0)]
    step0: f64,
}

impl SolverArgs {
    fn config(
        &self,
        lambda: f64,
        seed: u64,
        default_kernel: Option<KernelId>,
    ) -> Result<FitConfig> {
        let kernel = self.kernel.or(if self.penalty.is_none() {
            default_kernel
        } else {
            None
        });
        let penalty = match (self.penalty, kernel) {
            (Some(p), _) => p,
            (None, Some(_)) => Penalty::RkhsSeminorm,
            (None, None) => Penalty::SqL2,
        };
        let mut cfg = FitConfig::new(self.loss, penalty, lambda);
        if let Some(k) = kernel {
            cfg.kernel = k;
        }
        if penalty.is_kernel() && kernel.is_none() {
            return Err(Error::Domain("--penalty rkhs needs --kernel".into()));
        }
        cfg.use_intercept = self.intercept;
        cfg.max_iters = self.max_iters;
        cfg.dc_max_outer = self.dc_max_outer;
        cfg.rel_tol = self.rel_tol;
        cfg.step0 = self.step0;
        cfg.seed = seed;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Solver settings for `spec`, rejecting losses the world cannot use.
    /// With neither `--penalty` nor `--kernel`, the interval world gets its
    /// spline kernel and every other world a linear rule.
    fn config_for(&self, spec: &ExampleSpec, lambda: f64, seed: u64) -> Result<FitConfig> {
        let default_kernel = match spec {
            ExampleSpec::Ex53 { m } => Some(KernelId::spline(*m)?),
            _ => None,
        };
        let cfg = self.config(lambda, seed, default_kernel)?;
        if cfg.loss.is_binary() && spec.class_count() != 2 {
            return Err(Error::UnsupportedLoss(
                cfg.loss,
                "binary losses need a two-class world",
            ));
        }
        if cfg.loss == LossId::ZeroOne {
            return Err(Error::UnsupportedLoss(
                cfg.loss,
                "the 0-1 loss cannot be fitted",
            ));
        }
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    world: WorldArgs,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    world: WorldArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    lambda: f64,
    /// Sample size when the data are generated
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Training CSV; generated from the world when omitted
    #[arg(long)]
    data: Option<PathBuf>,
    /// Model output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Model written by `fit`
    #[arg(long)]
    model: PathBuf,
    /// World, e.g. `ex53(m=1)`; read from the model's metadata when omitted
    #[arg(long)]
    spec: Option<ExampleSpec>,
}

#[derive(Args, Debug)]
struct Fig1Args {
    #[arg(long, default_value_t = 0.75)]
    theta1: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Grid `start:stop:step`, or a comma list
    #[arg(long, default_value = "0.125:0.375:0.03125")]
    theta2: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RateArgs {
    #[command(flatten)]
    world: WorldArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// λ0 in λ = λ0 / n^power
    #[arg(long, default_value_t = 1.0)]
    lambda0: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda_power: f64,
    /// Sample sizes, `start:stop:step` or a comma list
    #[arg(long, default_value = "100,200,400,800,1600,3200")]
    n_grid: String,
    #[arg(long, default_value_t = 50)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Regret reference: bayes or ideal (default depends on world and loss)
    #[arg(long)]
    reference: Option<String>,
    /// Parallel replications (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FeatureArgs {
    #[arg(long, default_value_t = 0.8)]
    tau: f64,
    #[arg(long, default_value_t = 200)]
    p: usize,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Elastic-net weight on the L1 part
    #[arg(long, default_value_t = 0.9)]
    theta: f64,
    /// λ grid, `start:stop:step` or a comma list
    #[arg(long, default_value = "0.001,0.003,0.01,0.03,0.1,0.3")]
    lambda: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RootArgs {
    #[arg(long, default_value_t = 0.7)]
    theta: f64,
}

/// Failure with its exit class.
enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

/// Parses `start:stop:step` (both ends inclusive within half a step) or a
/// comma-separated list of decimals.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |m: &str| Error::Domain(format!("bad grid `{text}`: {m}"));
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| bad(&format!("`{v}` is not a number")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let vals = match parts.as_slice() {
        [single] => single.split(',').map(num).collect::<Result<Vec<_>>>()?,
        [start, stop, step] => {
            let (a, b, h) = (num(start)?, num(stop)?, num(step)?);
            if !(h > 0.0) || !(b >= a) {
                return Err(bad("need step > 0 and stop >= start"));
            }
            let count = ((b - a) / h + 0.5).floor() as usize;
            if count > 1_000_000 {
                return Err(bad("too many grid points"));
            }
            (0..=count).map(|i| a + i as f64 * h).collect()
        }
        _ => return Err(bad("expected start:stop:step or a comma list")),
    };
    if vals.is_empty() || vals.iter().any(|v| !v.is_finite()) {
        return Err(bad("values must be finite"));
    }
    Ok(vals)
}

fn parse_counts(text: &str) -> Result<Vec<usize>> {
    parse_grid(text)?
        .into_iter()
        .map(|v| {
            let r = v.round();
            if r < 1.0 || (v - r).abs() > 1e-9 {
                Err(Error::Domain(format!(
                    "bad sample-size grid `{text}`: `{v}` is not a positive integer"
                )))
            } else {
                Ok(r as usize)
            }
        })
        .collect()
}

fn emit(out: &Option<PathBuf>, body: &[u8]) -> std::result::Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, body).map_err(|e| Failure::Run(Error::Io(e))),
        None => io::stdout()
            .write_all(body)
            .map_err(|e| Failure::Run(Error::Io(e))),
    }
}

fn defaults_line(cfg: &FitConfig) -> String {
    let mut s = format!("# multimargin {}", env!("CARGO_PKG_VERSION"));
    for line in cfg.to_string().lines() {
        s.push_str("; ");
        s.push_str(line);
    }
    s
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    match cli.command {
        Command::Gen(a) => {
            let spec = a.world.spec().map_err(usage)?;
            let data = sample(&mut make_generator(spec, a.seed)?, a.n)?;
            let mut buf = Vec::new();
            write_csv(&data, Some(&metadata_line(a.seed, &spec)), &mut buf)?;
            emit(&a.out, &buf)
        }
        Command::Fit(a) => {
            let spec = a.world.spec().map_err(usage)?;
            let cfg = a
                .solver
                .config_for(&spec, a.lambda, a.seed)
                .map_err(usage)?;
            let data: Dataset = match &a.data {
                Some(path) => {
                    let file = fs::File::open(path).map_err(|e| Failure::Run(Error::Io(e)))?;
                    let data = read_csv(io::BufReader::new(file), Some(spec.class_count()))?;
                    if data.dim() != spec.input_dim() {
                        return Err(usage(Error::Domain(format!(
                            "--data has dimension {} but {spec} has dimension {}",
                            data.dim(),
                            spec.input_dim()
                        ))));
                    }
                    data
                }
                None => sample(&mut make_generator(spec, a.seed)?, a.n)?,
            };
            let report = fit(&cfg, &data)?;
            let ge = generalization_error(&spec, &report.decision)?;
            let mut body = String::new();
            body.push_str(&metadata_line(a.seed, &spec));
            body.push('\n');
            body.push_str(&defaults_line(&cfg));
            body.push('\n');
            body.push_str(&serialize_model(&report.decision));
            emit(&a.out, body.as_bytes())?;
            if a.out.is_some() {
                println!("{}", metadata_line(a.seed, &spec));
                println!(
                    "ge={} stderr={} converged={} iterations={}",
                    ge.value, ge.stderr, report.converged, report.iterations_used
                );
            }
            Ok(())
        }
        Command::Eval(a) => {
            let text = fs::read_to_string(&a.model).map_err(|e| Failure::Run(Error::Io(e)))?;
            let spec = match a.spec {
                Some(s) => s,
                None => spec_from_metadata(&text).map_err(usage)?,
            };
            let dec = parse_model(&text)?;
            let ge = generalization_error(&spec, &dec)?;
            println!("ge={} stderr={}", ge.value, ge.stderr);
            Ok(())
        }
        Command::Fig1(a) => {
            let grid = parse_grid(&a.theta2).map_err(usage)?;
            if !(a.theta1 > 0.5 && a.theta1 <= 1.0) || grid.iter().any(|t| !(*t > 0.0 && *t < 0.5))
            {
                return Err(Failure::Usage(format!(
                    "--theta1 must lie in (1/2, 1] and --theta2 values in (0, 1/2) (got theta1={}, theta2={})",
                    a.theta1, a.theta2
                )));
            }
            let rows = fig1_study(a.theta1, a.gamma, &grid)?;
            let mut buf = Vec::new();
            write_fig1_csv(&rows, a.theta1, a.gamma, &mut buf)?;
            emit(&a.out, &buf)
        }
        Command::Rate(a) => {
            let spec = a.world.spec().map_err(usage)?;
            let cfg = a
                .solver
                .config_for(&spec, a.lambda0, a.seed)
                .map_err(usage)?;
            let n_grid = parse_counts(&a.n_grid).map_err(usage)?;
            let reference = match a.reference.as_deref() {
                None => None,
                Some("bayes") => Some(Reference::GlobalBayes),
                Some("ideal") => Some(Reference::IdealMinimizer),
                Some(other) => {
                    return Err(Failure::Usage(format!(
                        "--reference: expected bayes or ideal, got `{other}`"
                    )))
                }
            };
            let opts = RateOptions {
                schedule: LambdaSchedule::Power(a.lambda_power),
                reference,
                jobs: a.jobs,
            };
            let res = rate_study_with(&spec, &cfg, &n_grid, a.reps, a.seed, opts)?;
            let mut buf = Vec::new();
            write_rate_csv(&res, &spec, &mut buf)?;
            emit(&a.out, &buf)
        }
        Command::Feature(a) => {
            let grid = parse_grid(&a.lambda).map_err(usage)?;
            let mut cfg = FeatureStudyConfig::new(a.tau, a.p, a.n, a.theta, grid, a.seed);
            cfg.max_iters = a.max_iters;
            ExampleSpec::ex54(a.tau, a.p).map_err(usage)?;
            Penalty::elastic_net(a.theta).map_err(usage)?;
            let rep = feature_study(&cfg)?;
            let mut buf = Vec::new();
            write_feature_csv(&rep, &cfg, &mut buf)?;
            emit(&a.out, &buf)
        }
        Command::Root(a) => {
            let r = quartic_root(a.theta).map_err(usage)?;
            println!("root={} residual={}", r, quartic_residual(a.theta, r));
            Ok(())
        }
    }
}

fn spec_from_metadata(text: &str) -> Result<ExampleSpec> {
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# seed=") {
            if let Some(spec) = rest
                .split_whitespace()
                .find_map(|tok| tok.strip_prefix("spec="))
            {
                return spec.parse();
            }
        }
    }
    Err(Error::Domain(
        "the model has no metadata line; pass --spec".into(),
    ))
}

/// Runs the command line `argv` (program name first) and returns the
/// process exit code.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("usage error");
            eprintln!("{line}");
            return 2;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}
