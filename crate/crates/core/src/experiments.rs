//! Simulation studies: the ideal-regret curves of the one-dimensional
//! world, empirical convergence rates, the spline-kernel comparison and the
//! sparse-signal feature-selection study.
//!
//! Every study is a pure function of its arguments and seed; replications
//! draw from their own generator, keyed by `(n, rep)`, so results do not
//! depend on thread scheduling.

use std::io::Write;

use rayon::prelude::*;

use crate::datagen::{make_generator, sample, Dataset, GENERATOR_NAME};
use crate::error::{domain, Error, Result};
use crate::margin::LossId;
use crate::model::{classify, Decision, KernelId, Penalty};
use crate::oracle::{
    bayes_risk, generalization_error, ideal_minimizer_1d, resolve_reference, theory_rate, Estimate,
    ExampleSpec, Reference,
};
use crate::solver::{fit, FitConfig};

/// The four binary losses of the one-dimensional comparison, in order.
pub const FIG1_LOSSES: [LossId; 4] = [
    LossId::BinaryExp,
    LossId::BinaryLogit,
    LossId::BinaryHinge,
    LossId::BinaryPsi,
];

/// SplitMix64 finalizer; used to derive independent stream seeds.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of stream `(a, b)` below a study seed.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b)
}

fn comment_line(seed: Option<u64>, spec: &str) -> String {
    let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    format!("# seed={seed} generator={GENERATOR_NAME} spec={spec}")
}

fn pool(jobs: Option<usize>) -> Result<Option<rayon::ThreadPool>> {
    match jobs {
        None => Ok(None),
        Some(0) => domain("jobs must be at least 1"),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map(Some)
            .map_err(|e| Error::Study(format!("cannot start worker pool: {e}"))),
    }
}

fn run_in<T: Send>(pool: &Option<rayon::ThreadPool>, job: impl FnOnce() -> T + Send) -> T {
    match pool {
        Some(p) => p.install(job),
        None => job(),
    }
}

// ---------------------------------------------------------------------------
// Ideal regrets in the one-dimensional world

/// Ideal regrets `e(f^{V_j}, f̄)` of the four binary losses at one `θ2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig1Row {
    pub theta2: f64,
    pub e_v1: f64,
    pub e_v2: f64,
    pub e_v3: f64,
    pub e_v4: f64,
}

impl Fig1Row {
    pub fn regrets(&self) -> [f64; 4] {
        [self.e_v1, self.e_v2, self.e_v3, self.e_v4]
    }
}

/// For each `θ2`, the misclassification regret of the population minimizer
/// of each binary loss (exponential, logistic, hinge, ψ) over `a x + b`.
pub fn fig1_study(theta1: f64, gamma: f64, theta2_grid: &[f64]) -> Result<Vec<Fig1Row>> {
    if !(theta1 > 0.5 && theta1 <= 1.0) {
        return domain(format!("theta1 must lie in (1/2, 1], got {theta1}"));
    }
    theta2_grid
        .iter()
        .map(|&theta2| {
            if !(theta2 > 0.0 && theta2 < 0.5) {
                return domain(format!(
                    "theta2 grid values must lie in (0, 1/2), got {theta2}"
                ));
            }
            let attach = |e: Error| Error::Study(format!("theta2={theta2}: {e}"));
            let spec = ExampleSpec::ex51(theta1, theta2, gamma).map_err(attach)?;
            let bayes = bayes_risk(&spec);
            let mut e = [0.0; 4];
            for (slot, loss) in e.iter_mut().zip(FIG1_LOSSES) {
                let point = ideal_minimizer_1d(loss, &spec).map_err(attach)?;
                let ge = generalization_error(&spec, &Decision::Linear(point.decision()))
                    .map_err(attach)?;
                *slot = ge.value - bayes;
            }
            Ok(Fig1Row {
                theta2,
                e_v1: e[0],
                e_v2: e[1],
                e_v3: e[2],
                e_v4: e[3],
            })
        })
        .collect()
}

pub fn write_fig1_csv<W: Write>(rows: &[Fig1Row], theta1: f64, gamma: f64, mut w: W) -> Result<()> {
    writeln!(
        w,
        "{}",
        comment_line(None, &format!("ex51(theta1={theta1};gamma={gamma})"))
    )?;
    writeln!(w, "theta2,e_v1,e_v2,e_v3,e_v4")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.theta2, r.e_v1, r.e_v2, r.e_v3, r.e_v4
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Convergence rates

/// How `λ` depends on the sample size in a rate study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSchedule {
    /// `λ = λ0 / n^power`, with `λ0` taken from the config.
    Power(f64),
    /// The config's `λ` at every `n`.
    Fixed,
}

impl LambdaSchedule {
    pub fn lambda(self, lambda0: f64, n: usize) -> f64 {
        match self {
            LambdaSchedule::Power(p) => lambda0 / (n as f64).powf(p),
            LambdaSchedule::Fixed => lambda0,
        }
    }
}

/// Optional knobs of [`rate_study_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    pub schedule: LambdaSchedule,
    /// `None` picks [`default_reference`].
    pub reference: Option<Reference>,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            schedule: LambdaSchedule::Power(1.0),
            reference: None,
            jobs: None,
        }
    }
}

/// The regret target of each world: the ideal minimizer for convex binary
/// losses in the one-dimensional world, the Bayes rule everywhere else.
pub fn default_reference(spec: &ExampleSpec, loss: LossId) -> Reference {
    match spec {
        ExampleSpec::Ex51 { .. } if loss.is_binary() && !loss.is_psi() => Reference::IdealMinimizer,
        _ => Reference::GlobalBayes,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateStudyResult {
    pub n_grid: Vec<usize>,
    pub mean_regret: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Per-`n` replication regrets, in replication order.
    pub regrets: Vec<Vec<f64>>,
    /// Sample sizes left out of the fit because their mean regret was ≤ 0.
    pub dropped: Vec<usize>,
    pub slope: f64,
    pub slope_stderr: f64,
    /// `None` when no rate is tabulated for the loss and world.
    pub theory_slope: Option<f64>,
    pub reference: Reference,
    pub seed: u64,
}

/// Least-squares slope of `log y` on `log n`, with the standard error from
/// the residuals. Needs three or more points with positive `y`.
pub fn log_log_slope(n: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if n.len() != y.len() || n.len() < 3 {
        return Err(Error::Study(format!(
            "a slope needs at least 3 points, got {}",
            n.len().min(y.len())
        )));
    }
    if n.iter().chain(y).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return domain("log-log regression needs positive finite values");
    }
    let xs: Vec<f64> = n.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return domain("log-log regression needs distinct sample sizes");
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    Ok((slope, (rss / (m - 2.0) / sxx).sqrt()))
}

/// Rate study with `λ = λ0 / n` and the default reference.
pub fn rate_study(
    spec: &ExampleSpec,
    config: &FitConfig,
    n_grid: &[usize],
    reps: usize,
    seed: u64,
) -> Result<RateStudyResult> {
    rate_study_with(spec, config, n_grid, reps, seed, RateOptions::default())
}

/// Fits `reps` independent samples at each `n` and regresses the log mean
/// regret on `log n`. Regrets against the ideal minimizer are taken in
/// absolute value, since the fitted rule may beat it in misclassification.
pub fn rate_study_with(
    spec: &ExampleSpec,
    config: &FitConfig,
    n_grid: &[usize],
    reps: usize,
    seed: u64,
    opts: RateOptions,
) -> Result<RateStudyResult> {
    if n_grid.len() < 3 {
        return domain(format!(
            "a rate study needs at least 3 sample sizes, got {}",
            n_grid.len()
        ));
    }
    if reps < 2 {
        return domain(format!(
            "a rate study needs at least 2 replications, got {reps}"
        ));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] == 0 {
        return domain("sample sizes must be positive and strictly increasing");
    }
    config.validate()?;
    let reference = opts
        .reference
        .unwrap_or_else(|| default_reference(spec, config.loss));
    let target = resolve_reference(spec, config.loss, reference)?;
    let jobs: Vec<(usize, usize)> = (0..n_grid.len())
        .flat_map(|i| (0..reps).map(move |r| (i, r)))
        .collect();

    let one = |&(i, r): &(usize, usize)| -> Result<f64> {
        let n = n_grid[i];
        let mut cfg = config.clone();
        cfg.lambda = opts.schedule.lambda(config.lambda, n);
        let mut gen = make_generator(*spec, derive_seed(seed, n as u64, r as u64))?;
        let data = sample(&mut gen, n)?;
        let report = fit(&cfg, &data)?;
        let e = generalization_error(spec, &report.decision)?.value - target.ge;
        Ok(match reference {
            Reference::IdealMinimizer => e.abs(),
            Reference::GlobalBayes => e,
        })
    };
    let workers = pool(opts.jobs)?;
    let flat: Vec<f64> = run_in(&workers, || {
        jobs.par_iter().map(one).collect::<Result<Vec<_>>>()
    })?;

    let regrets: Vec<Vec<f64>> = flat.chunks(reps).map(<[f64]>::to_vec).collect();
    let mean_regret: Vec<f64> = regrets
        .iter()
        .map(|r| r.iter().sum::<f64>() / reps as f64)
        .collect();
    let stderr: Vec<f64> = regrets
        .iter()
        .zip(&mean_regret)
        .map(|(r, m)| {
            (r.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (reps as f64 - 1.0) / reps as f64)
                .sqrt()
        })
        .collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut dropped = Vec::new();
    for (&n, &m) in n_grid.iter().zip(&mean_regret) {
        if m > 0.0 {
            xs.push(n as f64);
            ys.push(m);
        } else {
            dropped.push(n);
        }
    }
    if xs.len() < 3 {
        return Err(Error::Study(format!(
            "only {} sample sizes have a positive mean regret (dropped n = {dropped:?})",
            xs.len()
        )));
    }
    let (slope, slope_stderr) = log_log_slope(&xs, &ys)?;
    Ok(RateStudyResult {
        n_grid: n_grid.to_vec(),
        mean_regret,
        stderr,
        regrets,
        dropped,
        slope,
        slope_stderr,
        theory_slope: theory_rate(spec, config.loss).ok(),
        reference,
        seed,
    })
}

/// Per-`n` rows (`n,mean_regret,stderr,dropped`) followed by a `# slope`
/// comment line.
pub fn write_rate_csv<W: Write>(res: &RateStudyResult, spec: &ExampleSpec, mut w: W) -> Result<()> {
    writeln!(w, "{}", comment_line(Some(res.seed), &spec.to_string()))?;
    writeln!(w, "n,mean_regret,stderr,dropped")?;
    for ((n, m), s) in res.n_grid.iter().zip(&res.mean_regret).zip(&res.stderr) {
        writeln!(w, "{n},{m},{s},{}", res.dropped.contains(n))?;
    }
    let theory = res
        .theory_slope
        .map_or_else(|| "none".to_string(), |t| t.to_string());
    writeln!(
        w,
        "# slope={} slope_stderr={} theory_slope={theory} reference={}",
        res.slope, res.slope_stderr, res.reference
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Spline-kernel learning on the three-class interval

/// Per-seed outcome of the spline-kernel comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineStudyRow {
    pub seed: u64,
    pub svm_lambda: f64,
    pub svm_ge: f64,
    pub psi_lambda: f64,
    pub psi_ge: f64,
    /// Whether every ψ fit's objective trace was nonincreasing within its
    /// `rel_tol`.
    pub psi_traces_monotone: bool,
}

/// Fraction of `data` misclassified by `dec`.
pub fn empirical_error(dec: &Decision, data: &Dataset) -> Result<f64> {
    let mut wrong = 0usize;
    for (x, y) in data.iter() {
        if classify(dec, x)? != y {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / data.len() as f64)
}

pub(crate) fn trace_monotone(trace: &[f64], rel_tol: f64) -> bool {
    trace
        .windows(2)
        .all(|w| w[1] <= w[0] + rel_tol * (1.0 + w[0].abs()))
}

/// For each seed, fits the spline-kernel SVM (`svm1`) and ψ-learning on a
/// training sample of size `n` at every `λ` in the grid, picks each
/// method's `λ` by misclassification on an independent validation sample
/// of the same size (first minimum in grid order), and reports the chosen
/// fits' exact GE.
pub fn spline_study(
    m: u32,
    n: usize,
    lambda_grid: &[f64],
    seeds: &[u64],
    jobs: Option<usize>,
) -> Result<Vec<SplineStudyRow>> {
    if lambda_grid.is_empty() {
        return domain("lambda grid is empty");
    }
    let spec = ExampleSpec::ex53(m)?;
    let kernel = KernelId::spline(m)?;
    let one = |&seed: &u64| -> Result<SplineStudyRow> {
        let train = sample(&mut make_generator(spec, derive_seed(seed, 0, 0))?, n)?;
        let valid = sample(&mut make_generator(spec, derive_seed(seed, 0, 1))?, n)?;
        let mut best = [(f64::INFINITY, 0.0, 0.0); 2];
        let mut monotone = true;
        for &lambda in lambda_grid {
            for (slot, loss) in best.iter_mut().zip([LossId::Svm1, LossId::Psi]) {
                let mut cfg = FitConfig::new(loss, Penalty::RkhsSeminorm, lambda);
                cfg.kernel = kernel;
                let rep = fit(&cfg, &train)?;
                if loss.is_psi() {
                    monotone &= trace_monotone(&rep.objective_trace, cfg.rel_tol);
                }
                let err = empirical_error(&rep.decision, &valid)?;
                if err < slot.0 {
                    *slot = (
                        err,
                        lambda,
                        generalization_error(&spec, &rep.decision)?.value,
                    );
                }
            }
        }
        Ok(SplineStudyRow {
            seed,
            svm_lambda: best[0].1,
            svm_ge: best[0].2,
            psi_lambda: best[1].1,
            psi_ge: best[1].2,
            psi_traces_monotone: monotone,
        })
    };
    let workers = pool(jobs)?;
    run_in(&workers, || seeds.par_iter().map(one).collect())
}

// ---------------------------------------------------------------------------
// Feature selection with many redundant inputs

/// Settings of [`feature_study`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureStudyConfig {
    pub tau: f64,
    pub p: usize,
    pub n: usize,
    /// Elastic-net weight on the L1 part.
    pub theta: f64,
    pub lambda_grid: Vec<f64>,
    pub seed: u64,
    pub max_iters: usize,
}

impl FeatureStudyConfig {
    pub fn new(tau: f64, p: usize, n: usize, theta: f64, lambda_grid: Vec<f64>, seed: u64) -> Self {
        Self {
            tau,
            p,
            n,
            theta,
            lambda_grid,
            seed,
            max_iters: crate::solver::DEFAULT_MAX_ITERS,
        }
    }
}

/// One `λ` of the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureFit {
    pub lambda: f64,
    pub validation_error: f64,
    pub nonzero: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureReport {
    pub seed: u64,
    pub fits: Vec<FeatureFit>,
    pub chosen_lambda: f64,
    /// Oracle GE of the chosen fit.
    pub test_ge: Estimate,
    pub bayes_risk: f64,
    /// Slope of the chosen fit.
    pub weights: Vec<f64>,
    /// `(coordinate, |w_j|)`, 1-based coordinates, largest first; ties
    /// keep coordinate order.
    pub ranked: Vec<(usize, f64)>,
    /// Every fit on the grid had all-zero weights.
    pub degenerate: bool,
}

/// Binary hinge with the elastic-net penalty and no intercept, `λ` chosen
/// by misclassification on an independent validation sample of size `n`.
pub fn feature_study(cfg: &FeatureStudyConfig) -> Result<FeatureReport> {
    // p = 1 is accepted: it reduces to the one-dimensional world and serves
    // as a consistency check
    if cfg.p == 0 {
        return domain("p must be at least 1");
    }
    if cfg.n < 10 {
        return domain(format!("n must be at least 10, got {}", cfg.n));
    }
    if cfg.lambda_grid.is_empty() {
        return domain("lambda grid is empty");
    }
    let spec = ExampleSpec::ex54(cfg.tau, cfg.p)?;
    let train = sample(
        &mut make_generator(spec, derive_seed(cfg.seed, 0, 0))?,
        cfg.n,
    )?;
    let valid = sample(
        &mut make_generator(spec, derive_seed(cfg.seed, 0, 1))?,
        cfg.n,
    )?;
    let mut fits = Vec::with_capacity(cfg.lambda_grid.len());
    let mut best: Option<(f64, f64, Decision)> = None;
    for &lambda in &cfg.lambda_grid {
        let mut fc = FitConfig::new(
            LossId::BinaryHinge,
            Penalty::elastic_net(cfg.theta)?,
            lambda,
        );
        fc.max_iters = cfg.max_iters;
        let rep = fit(&fc, &train)?;
        let lin = rep
            .decision
            .as_linear()
            .ok_or_else(|| Error::Study("expected a linear fit".into()))?;
        let nonzero = lin.free_slopes().iter().filter(|v| **v != 0.0).count();
        let err = empirical_error(&rep.decision, &valid)?;
        fits.push(FeatureFit {
            lambda,
            validation_error: err,
            nonzero,
        });
        if best.as_ref().map_or(true, |b| err < b.0) {
            best = Some((err, lambda, rep.decision));
        }
    }
    let (_, chosen_lambda, decision) = best.expect("grid is nonempty");
    let weights = decision
        .as_linear()
        .expect("linear fit")
        .free_slopes()
        .to_vec();
    let mut ranked: Vec<(usize, f64)> = weights
        .iter()
        .enumerate()
        .map(|(j, w)| (j + 1, w.abs()))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(FeatureReport {
        seed: cfg.seed,
        degenerate: fits.iter().all(|f| f.nonzero == 0),
        fits,
        chosen_lambda,
        test_ge: generalization_error(&spec, &decision)?,
        bayes_risk: bayes_risk(&spec),
        weights,
        ranked,
    })
}

/// Ranked weights (`rank,coordinate,abs_weight,weight`) followed by
/// comment lines with the grid, the chosen `λ` and the test GE.
pub fn write_feature_csv<W: Write>(
    rep: &FeatureReport,
    cfg: &FeatureStudyConfig,
    mut w: W,
) -> Result<()> {
    let spec = ExampleSpec::ex54(cfg.tau, cfg.p)?;
    writeln!(w, "{}", comment_line(Some(rep.seed), &spec.to_string()))?;
    writeln!(w, "rank,coordinate,abs_weight,weight")?;
    for (rank, &(j, a)) in rep.ranked.iter().enumerate() {
        writeln!(w, "{},{j},{a},{}", rank + 1, rep.weights[j - 1])?;
    }
    for f in &rep.fits {
        writeln!(
            w,
            "# lambda={} validation_error={} nonzero={}",
            f.lambda, f.validation_error, f.nonzero
        )?;
    }
    writeln!(
        w,
        "# chosen_lambda={} test_ge={} test_ge_stderr={} bayes_risk={} degenerate={}",
        rep.chosen_lambda, rep.test_ge.value, rep.test_ge.stderr, rep.bayes_risk, rep.degenerate
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn slope_is_exact_on_power_laws() {
        let n = [100.0, 200.0, 400.0, 800.0, 1600.0, 3200.0];
        let y: Vec<f64> = n.iter().map(|v: &f64| 3.0 * v.powf(-0.5)).collect();
        let (s, se) = log_log_slope(&n, &y).unwrap();
        assert_abs_diff_eq!(s, -0.5, epsilon = 1e-12);
        assert!(se < 1e-10);
        assert!(log_log_slope(&n[..2], &y[..2]).is_err());
        assert!(log_log_slope(&n, &[1.0, 0.0, 1.0, 1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let s: std::collections::HashSet<u64> = (0..10)
            .flat_map(|a| (0..10).map(move |b| derive_seed(7, a, b)))
            .collect();
        assert_eq!(s.len(), 100);
        assert_eq!(derive_seed(7, 1, 2), derive_seed(7, 1, 2));
    }

    #[test]
    fn references() {
        let s51 = ExampleSpec::ex51(0.75, 0.125, 0.0).unwrap();
        assert_eq!(
            default_reference(&s51, LossId::BinaryHinge),
            Reference::IdealMinimizer
        );
        assert_eq!(
            default_reference(&s51, LossId::BinaryPsi),
            Reference::GlobalBayes
        );
        let s52 = ExampleSpec::ex52(0.7, 0.0).unwrap();
        assert_eq!(
            default_reference(&s52, LossId::Svm2),
            Reference::GlobalBayes
        );
    }

    #[test]
    fn schedule() {
        assert_eq!(LambdaSchedule::Power(1.0).lambda(2.0, 100), 0.02);
        assert_eq!(LambdaSchedule::Fixed.lambda(2.0, 100), 2.0);
    }

    #[test]
    fn fig1_rejects_bad_grids() {
        assert!(fig1_study(0.75, 0.0, &[0.6]).is_err());
        assert!(fig1_study(0.4, 0.0, &[0.25]).is_err());
        assert!(fig1_study(0.75, 0.0, &[]).unwrap().is_empty());
    }

    #[test]
    fn rate_study_rejects_bad_inputs() {
        let spec = ExampleSpec::ex52(0.7, 0.0).unwrap();
        let cfg = FitConfig::new(LossId::Svm2, Penalty::SqL2, 1.0);
        assert!(rate_study(&spec, &cfg, &[10, 20], 2, 0).is_err());
        assert!(rate_study(&spec, &cfg, &[10, 20, 30], 1, 0).is_err());
        assert!(rate_study(&spec, &cfg, &[10, 30, 20], 2, 0).is_err());
    }

    #[test]
    fn trace_check() {
        assert!(trace_monotone(&[3.0, 2.0, 2.0, 1.0], 1e-6));
        assert!(!trace_monotone(&[3.0, 2.0, 2.1], 1e-6));
    }
}
