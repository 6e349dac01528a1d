//! Minimization of the penalized empirical cost
//! `n⁻¹ Σ V(f, Z_i) + λ J(f)`.
//!
//! Convex losses are handled by full-batch proximal subgradient descent
//! with steps `step0/√t`: every penalty enters through its exact proximal
//! map (the L1 penalty's derived-row term excepted for `k > 2`, which takes
//! a subgradient step). The reported point is the best of the iterates and
//! of suffix averages restarted at powers of two. Linear rules are updated
//! in their `k − 1` free rows; kernel expansions take the natural (RKHS
//! metric) gradient, projected onto the zero-sum subspace.
//!
//! Kernel expansions under the hinge-type losses (`Svm1`, `Svm3`, the
//! binary hinge) are instead solved exactly by randomized dual coordinate
//! ascent, stopped on the duality gap; the subgradient method converges too
//! slowly there once `λ` is small.
//!
//! The ψ-losses are minimized by a difference-of-convex scheme: the concave
//! part is linearized at the current iterate and the resulting convex
//! surrogate is solved with the same machinery (warm-started where the
//! subgradient method is used).

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::datagen::Dataset;
use crate::error::{domain, Error, Result};
use crate::margin::{argmin_lowest, loss_margins_into, margin_grad_to_f, subgrad, value, LossId};
use crate::model::{
    penalty_eval, Decision, DecisionFn, GramOp, KernelDecision, KernelId, LinearDecision, Penalty,
};

pub const DEFAULT_MAX_ITERS: usize = 20_000;
pub const DEFAULT_DC_MAX_OUTER: usize = 20;
pub const DEFAULT_REL_TOL: f64 = 1e-6;
pub const DEFAULT_STEP0: f64 = 1.0;

/// Iterations between convergence checks.
const WINDOW: usize = 1000;
/// Iterations between evaluations of the averaged iterate.
const AVG_EVERY: usize = 100;

/// Solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub loss: LossId,
    pub penalty: Penalty,
    pub lambda: f64,
    pub max_iters: usize,
    pub dc_max_outer: usize,
    pub rel_tol: f64,
    pub step0: f64,
    /// Seeds the sample order of the dual solver; fits are deterministic
    /// given the configuration.
    pub seed: u64,
    pub use_intercept: bool,
    /// Kernel of the expansion fitted under the RKHS penalty.
    pub kernel: KernelId,
}

impl FitConfig {
    /// Default budgets with the given loss, penalty and `λ`.
    pub fn new(loss: LossId, penalty: Penalty, lambda: f64) -> Self {
        Self {
            loss,
            penalty,
            lambda,
            max_iters: DEFAULT_MAX_ITERS,
            dc_max_outer: DEFAULT_DC_MAX_OUTER,
            rel_tol: DEFAULT_REL_TOL,
            step0: DEFAULT_STEP0,
            seed: 0,
            use_intercept: false,
            kernel: KernelId::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return domain(format!(
                "lambda must be finite and nonnegative, got {}",
                self.lambda
            ));
        }
        if !(self.rel_tol > 0.0) {
            return domain(format!("rel_tol must be positive, got {}", self.rel_tol));
        }
        if self.max_iters == 0 {
            return domain("max_iters must be at least 1");
        }
        if !(self.step0 > 0.0 && self.step0.is_finite()) {
            return domain(format!("step0 must be positive, got {}", self.step0));
        }
        if let Penalty::ElasticNet(t) = self.penalty {
            Penalty::elastic_net(t)?;
        }
        if self.loss == LossId::BinaryExp && self.lambda == 0.0 {
            return domain("the exponential loss needs lambda > 0 to be bounded below");
        }
        Ok(())
    }

    /// Parses a `key = value` document; `#` starts a comment line. Missing
    /// keys keep their defaults; `loss`, `penalty` and `lambda` are required.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = FitConfig::new(LossId::Svm1, Penalty::SqL2, 0.0);
        let mut seen = std::collections::HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: idx + 1, msg };
            let (key, val) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, found `{line}`")))?;
            let (key, val) = (key.trim(), val.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|e| err(format!("bad number for `{key}`: {e}")))
            };
            let int = |v: &str| {
                v.parse::<u64>()
                    .map_err(|e| err(format!("bad integer for `{key}`: {e}")))
            };
            match key {
                "loss" => cfg.loss = val.parse().map_err(|e: Error| err(e.to_string()))?,
                "penalty" => cfg.penalty = val.parse().map_err(|e: Error| err(e.to_string()))?,
                "kernel" => cfg.kernel = val.parse().map_err(|e: Error| err(e.to_string()))?,
                "lambda" => cfg.lambda = num(val)?,
                "rel_tol" => cfg.rel_tol = num(val)?,
                "step0" => cfg.step0 = num(val)?,
                "max_iters" => cfg.max_iters = int(val)? as usize,
                "dc_max_outer" => cfg.dc_max_outer = int(val)? as usize,
                "seed" => cfg.seed = int(val)?,
                "use_intercept" => {
                    cfg.use_intercept = val
                        .parse()
                        .map_err(|_| err(format!("bad flag `{val}`, use true/false")))?
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        for required in ["loss", "penalty", "lambda"] {
            if !seen.contains(required) {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("missing key `{required}`"),
                });
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for FitConfig {
    /// The `key = value` document accepted by [`FitConfig::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "loss = {}", self.loss)?;
        writeln!(f, "penalty = {}", self.penalty)?;
        writeln!(f, "lambda = {}", self.lambda)?;
        writeln!(f, "kernel = {}", self.kernel)?;
        writeln!(f, "use_intercept = {}", self.use_intercept)?;
        writeln!(f, "max_iters = {}", self.max_iters)?;
        writeln!(f, "dc_max_outer = {}", self.dc_max_outer)?;
        writeln!(f, "rel_tol = {}", self.rel_tol)?;
        writeln!(f, "step0 = {}", self.step0)?;
        writeln!(f, "seed = {}", self.seed)
    }
}

/// Result of a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub decision: Decision,
    /// Best objective after each convergence window (convex fits) or after
    /// each accepted outer step (ψ fits, starting from the initial fit).
    pub objective_trace: Vec<f64>,
    pub converged: bool,
    pub iterations_used: usize,
}

/// Convex surrogate: `scale · V(u) + coef · u_idx` per sample.
struct Surrogate {
    loss: LossId,
    scale: f64,
    tilt: Option<(Vec<Option<usize>>, f64)>,
}

impl Surrogate {
    fn plain(loss: LossId) -> Self {
        Self {
            loss,
            scale: 1.0,
            tilt: None,
        }
    }
}

enum Form {
    Linear {
        d: usize,
        intercept: bool,
    },
    Kernel {
        gram: GramOp,
        kernel: KernelId,
        anchors: Vec<Vec<f64>>,
    },
}

struct Problem<'a> {
    data: &'a Dataset,
    n: usize,
    k: usize,
    form: Form,
    penalty: Penalty,
    lambda: f64,
}

fn soft(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

impl<'a> Problem<'a> {
    fn new(config: &FitConfig, data: &'a Dataset) -> Result<Self> {
        config.validate()?;
        let k = data.class_count();
        if config.loss.is_binary() && k != 2 {
            return Err(Error::UnsupportedLoss(
                config.loss,
                "binary losses need two classes",
            ));
        }
        let form = if config.penalty.is_kernel() {
            let anchors = data.points();
            let gram = GramOp::new(config.kernel, &anchors)?;
            Form::Kernel {
                gram,
                kernel: config.kernel,
                anchors,
            }
        } else {
            Form::Linear {
                d: data.dim(),
                intercept: config.use_intercept,
            }
        };
        Ok(Self {
            data,
            n: data.len(),
            k,
            form,
            penalty: config.penalty,
            lambda: config.lambda,
        })
    }

    fn dim(&self) -> usize {
        match &self.form {
            Form::Linear { d, intercept } => (self.k - 1) * (d + usize::from(*intercept)),
            Form::Kernel { .. } => self.n * (self.k - 1),
        }
    }

    /// Full `n × k` decision values.
    fn forward(&self, th: &[f64], f: &mut [f64]) {
        let (k, km) = (self.k, self.k - 1);
        match &self.form {
            Form::Linear { d, intercept } => {
                let d = *d;
                let (w, b) = th.split_at(km * d);
                for (i, fi) in f.chunks_mut(k).enumerate() {
                    let x = self.data.point(i);
                    let mut total = 0.0;
                    for c in 0..km {
                        let mut v = if *intercept { b[c] } else { 0.0 };
                        for (wj, xj) in w[c * d..(c + 1) * d].iter().zip(x) {
                            v += wj * xj;
                        }
                        fi[c] = v;
                        total += v;
                    }
                    fi[km] = -total;
                }
            }
            Form::Kernel { gram, .. } => {
                gram.apply(th, km, f, k, km);
                for fi in f.chunks_mut(k) {
                    fi[km] = -fi[..km].iter().sum::<f64>();
                }
            }
        }
    }

    fn penalty_value(&self, th: &[f64], f: &[f64]) -> f64 {
        let km = self.k - 1;
        match (&self.form, self.penalty) {
            (Form::Kernel { .. }, _) => {
                // Σ_c α_c·(Gα_c) over all k classes, with the derived class
                // contributing (Σ_c α_c)·(Σ_c Gα_c)
                let mut total = 0.0;
                for (a, fi) in th.chunks(km).zip(f.chunks(self.k)) {
                    let mut sa = 0.0;
                    let mut sf = 0.0;
                    for c in 0..km {
                        total += a[c] * fi[c];
                        sa += a[c];
                        sf += fi[c];
                    }
                    total += sa * sf;
                }
                total
            }
            (Form::Linear { d, .. }, pen) => {
                let w = &th[..km * d];
                let derived = |j: usize| -> f64 { (0..km).map(|c| w[c * d + j]).sum() };
                match pen {
                    Penalty::SqL2 => {
                        w.iter().map(|v| v * v).sum::<f64>()
                            + (0..*d).map(|j| derived(j).powi(2)).sum::<f64>()
                    }
                    Penalty::L1 => {
                        w.iter().map(|v| v.abs()).sum::<f64>()
                            + (0..*d).map(|j| derived(j).abs()).sum::<f64>()
                    }
                    Penalty::ElasticNet(t) => {
                        t * w.iter().map(|v| v.abs()).sum::<f64>()
                            + (1.0 - t) * w.iter().map(|v| v * v).sum::<f64>()
                    }
                    Penalty::RkhsSeminorm => unreachable!("kernel penalty implies a kernel form"),
                }
            }
        }
    }

    /// Mean surrogate loss; writes `n⁻¹ ∂V_i/∂f_i` into `gf` when given.
    fn loss(
        &self,
        sur: &Surrogate,
        f: &[f64],
        mut gf: Option<&mut [f64]>,
        u: &mut [f64],
        g: &mut [f64],
    ) -> f64 {
        let k = self.k;
        let inv_n = 1.0 / self.n as f64;
        let mut total = 0.0;
        for (i, fi) in f.chunks(k).enumerate() {
            let y = self.data.label(i) - 1;
            let m = loss_margins_into(sur.loss, fi, y, u);
            let tilt = sur
                .tilt
                .as_ref()
                .and_then(|(pat, coef)| pat[i].map(|j| (j, *coef)));
            let mut v = sur.scale * value(sur.loss, &u[..m]);
            if let Some((j, coef)) = tilt {
                v += coef * u[j];
            }
            total += v;
            if let Some(gf) = gf.as_deref_mut() {
                subgrad(sur.loss, &u[..m], &mut g[..m]);
                g[..m].iter_mut().for_each(|x| *x *= sur.scale * inv_n);
                if let Some((j, coef)) = tilt {
                    g[j] += coef * inv_n;
                }
                margin_grad_to_f(sur.loss, &g[..m], y, &mut gf[i * k..(i + 1) * k]);
            }
        }
        total * inv_n
    }

    fn param_grad(&self, gf: &[f64], out: &mut [f64]) {
        let (k, km) = (self.k, self.k - 1);
        out.iter_mut().for_each(|v| *v = 0.0);
        match &self.form {
            Form::Linear { d, intercept } => {
                let d = *d;
                let (w, b) = out.split_at_mut(km * d);
                for (i, gi) in gf.chunks(k).enumerate() {
                    let x = self.data.point(i);
                    for c in 0..km {
                        let gc = gi[c] - gi[km];
                        if gc != 0.0 {
                            for (wj, xj) in w[c * d..(c + 1) * d].iter_mut().zip(x) {
                                *wj += gc * xj;
                            }
                            if *intercept {
                                b[c] += gc;
                            }
                        }
                    }
                }
            }
            Form::Kernel { .. } => {
                let kf = k as f64;
                for (gi, oi) in gf.chunks(k).zip(out.chunks_mut(km)) {
                    let mean = gi.iter().sum::<f64>() / kf;
                    for c in 0..km {
                        oi[c] = gi[c] - mean;
                    }
                }
            }
        }
    }

    fn prox(&self, th: &mut [f64], eta: f64) {
        let km = self.k - 1;
        let s = eta * self.lambda;
        if s == 0.0 {
            return;
        }
        match &self.form {
            Form::Kernel { .. } => {
                let f = 1.0 / (1.0 + 2.0 * s);
                th.iter_mut().for_each(|v| *v *= f);
            }
            Form::Linear { d, .. } => {
                let d = *d;
                let w = &mut th[..km * d];
                match self.penalty {
                    Penalty::SqL2 => {
                        // (a I + b 11ᵀ)⁻¹ per column, a = 1 + 2s, b = 2s
                        let (a, b) = (1.0 + 2.0 * s, 2.0 * s);
                        let shrink = b / (a + km as f64 * b);
                        for j in 0..d {
                            let sum: f64 = (0..km).map(|c| w[c * d + j]).sum();
                            for c in 0..km {
                                w[c * d + j] = (w[c * d + j] - shrink * sum) / a;
                            }
                        }
                    }
                    Penalty::L1 => {
                        if km == 1 {
                            w.iter_mut().for_each(|v| *v = soft(*v, 2.0 * s));
                        } else {
                            for j in 0..d {
                                let sum: f64 = (0..km).map(|c| w[c * d + j]).sum();
                                let push = s * sum.signum() * f64::from(u8::from(sum != 0.0));
                                for c in 0..km {
                                    w[c * d + j] = soft(w[c * d + j] - push, s);
                                }
                            }
                        }
                    }
                    Penalty::ElasticNet(t) => {
                        let denom = 1.0 + 2.0 * s * (1.0 - t);
                        w.iter_mut().for_each(|v| *v = soft(*v, s * t) / denom);
                    }
                    Penalty::RkhsSeminorm => unreachable!("kernel penalty implies a kernel form"),
                }
            }
        }
    }

    fn decision(&self, th: &[f64]) -> Result<Decision> {
        let km = self.k - 1;
        match &self.form {
            Form::Linear { d, intercept } => {
                let w = th[..km * d].to_vec();
                let b = if *intercept {
                    th[km * d..].to_vec()
                } else {
                    vec![0.0; km]
                };
                Ok(Decision::Linear(LinearDecision::from_free(
                    self.k, *d, w, b,
                )?))
            }
            Form::Kernel {
                kernel, anchors, ..
            } => Ok(Decision::Kernel(KernelDecision::from_free(
                self.k,
                *kernel,
                anchors.clone(),
                th.to_vec(),
            )?)),
        }
    }
}

/// Scratch buffers shared by objective evaluations.
struct Work {
    f: Vec<f64>,
    gf: Vec<f64>,
    u: Vec<f64>,
    g: Vec<f64>,
}

impl Work {
    fn new(p: &Problem) -> Self {
        Self {
            f: vec![0.0; p.n * p.k],
            gf: vec![0.0; p.n * p.k],
            u: vec![0.0; p.k],
            g: vec![0.0; p.k],
        }
    }

    fn objective(&mut self, p: &Problem, sur: &Surrogate, th: &[f64]) -> f64 {
        p.forward(th, &mut self.f);
        p.loss(sur, &self.f, None, &mut self.u, &mut self.g)
            + p.lambda * p.penalty_value(th, &self.f)
    }
}

struct Inner {
    theta: Vec<f64>,
    trace: Vec<f64>,
    converged: bool,
    iterations: usize,
    /// Final dual point, when the dual solver ran.
    dual: Option<Vec<f64>>,
}

fn minimize(p: &Problem, sur: &Surrogate, init: Vec<f64>, cfg: &FitConfig) -> Inner {
    let dim = p.dim();
    let mut w = Work::new(p);
    let mut th = init;
    let mut grad = vec![0.0; dim];
    let mut avg = th.clone();
    let mut avg_count = 0usize;
    let mut best_th = th.clone();
    let mut best = f64::INFINITY;
    let mut trace = Vec::new();
    let mut window_start = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for t in 1..=cfg.max_iters {
        iterations = t;
        p.forward(&th, &mut w.f);
        let obj = p.loss(sur, &w.f, Some(&mut w.gf), &mut w.u, &mut w.g)
            + p.lambda * p.penalty_value(&th, &w.f);
        if obj < best {
            best = obj;
            best_th.copy_from_slice(&th);
        }
        p.param_grad(&w.gf, &mut grad);
        let eta = cfg.step0 / (t as f64).sqrt();
        for (v, gv) in th.iter_mut().zip(&grad) {
            *v -= eta * gv;
        }
        p.prox(&mut th, eta);
        if t.is_power_of_two() {
            avg.copy_from_slice(&th);
            avg_count = 1;
        } else {
            avg_count += 1;
            let inv = 1.0 / avg_count as f64;
            for (a, v) in avg.iter_mut().zip(&th) {
                *a += (v - *a) * inv;
            }
        }
        if t % AVG_EVERY == 0 || t == cfg.max_iters {
            for cand in [&avg, &th] {
                let o = w.objective(p, sur, cand);
                if o < best {
                    best = o;
                    best_th.copy_from_slice(cand);
                }
            }
        }
        if t % WINDOW == 0 {
            trace.push(best);
            if window_start - best < cfg.rel_tol * (1.0 + best.abs()) {
                converged = true;
                break;
            }
            window_start = best;
        }
    }
    if trace.last() != Some(&best) {
        trace.push(best);
    }
    Inner {
        theta: best_th,
        trace,
        converged,
        iterations,
        dual: None,
    }
}

/// Feasible set of one sample's dual variables in [`dual_minimize`], for
/// a surrogate of scale `s`.
#[derive(Clone, Copy)]
enum DualSet {
    /// `0 <= γ_j <= s`: a sum of hinges.
    Box,
    /// `γ >= 0`, `Σ_j γ_j <= s`: the hinge of the smallest margin.
    Simplex,
}

/// Root of a nondecreasing, piecewise-linear `h` on `[lo, hi]` with
/// `h(lo) <= 0 <= h(hi)` and kinks only at `kinks`.
fn pl_root(lo: f64, hi: f64, kinks: &[f64], buf: &mut Vec<f64>, h: impl Fn(f64) -> f64) -> f64 {
    buf.clear();
    buf.extend(kinks.iter().copied().filter(|&x| x > lo && x < hi));
    buf.push(hi);
    buf.sort_by(f64::total_cmp);
    let (mut x0, mut h0) = (lo, h(lo));
    for &x in buf.iter() {
        let hx = h(x);
        if hx >= 0.0 {
            return if hx > h0 {
                x0 - h0 * (x - x0) / (hx - h0)
            } else {
                x
            };
        }
        (x0, h0) = (x, hx);
    }
    hi
}

/// Exact maximizer over `γ` in the set of
/// `Σ_j b_j Δ_j − q(|Δ|² + (Σ_j Δ_j)²)`, `Δ = γ − γ_old`, written in place.
/// `z` and `buf` are scratch.
fn block_update(
    set: DualSet,
    s: f64,
    gamma: &mut [f64],
    b: &[f64],
    q: f64,
    z: &mut Vec<f64>,
    buf: &mut Vec<f64>,
) {
    let t0: f64 = gamma.iter().sum();
    z.clear();
    z.extend(gamma.iter().zip(b).map(|(g, bj)| g + bj / (2.0 * q)));
    let z = &z[..];
    match set {
        DualSet::Box => {
            // kinks of θ ↦ clip(z_j − θ, 0, s) at z_j − s and z_j
            let kinks: Vec<f64> = z.iter().flat_map(|&zj| [zj - s, zj]).collect();
            let hi = -t0 + s * z.len() as f64;
            let th = pl_root(-t0, hi, &kinks, buf, |th| {
                th + t0 - z.iter().map(|zj| (zj - th).clamp(0.0, s)).sum::<f64>()
            });
            for (g, zj) in gamma.iter_mut().zip(z) {
                *g = (zj - th).clamp(0.0, s);
            }
        }
        DualSet::Simplex => {
            let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let pos = |th: f64| z.iter().map(|zj| (zj - th).max(0.0)).sum::<f64>();
            let mut th = pl_root(-t0, zmax.max(-t0), z, buf, |th| th + t0 - pos(th));
            if pos(th) > s {
                th = pl_root(zmax - s, zmax, z, buf, |th| s - pos(th));
            }
            for (g, zj) in gamma.iter_mut().zip(z) {
                *g = (zj - th).max(0.0);
            }
        }
    }
}

/// Dual coordinate ascent for hinge-type surrogates on kernel expansions.
///
/// Each sample's loss is written as `max_γ Σ_j γ_j (1 − u_j)` over a box or
/// a capped simplex, plus the tilt `coef · u_j`. The coefficients then follow
/// from the dual point as `α_i = σ/(2λn) Σ_j β_ij (e_y − e_c(j))` with
/// `β = γ − coef·e_tilt` (`σ = ½` for the binary margin), and each sample's
/// block is maximized exactly in turn. The run stops once the duality gap is
/// below `rel_tol (1 + |P|)`; the trace holds the best primal value per
/// epoch. `warm` is an earlier dual point of the same problem, e.g. from the
/// previous DC step; it stays feasible when only the tilt changes. Returns
/// `None` when the problem is outside this case.
fn dual_minimize(
    p: &Problem,
    sur: &Surrogate,
    cfg: &FitConfig,
    warm: Option<&[f64]>,
) -> Option<Inner> {
    let Form::Kernel {
        gram,
        kernel,
        anchors,
    } = &p.form
    else {
        return None;
    };
    let (set, sigma) = match sur.loss {
        LossId::Svm1 => (DualSet::Box, 1.0),
        LossId::Svm3 => (DualSet::Simplex, 1.0),
        LossId::BinaryHinge => (DualSet::Box, 0.5),
        _ => return None,
    };
    if !(p.lambda > 0.0 && sur.scale > 0.0) {
        return None;
    }
    let (n, k) = (p.n, p.k);
    let m = if sur.loss.is_binary() { 1 } else { k - 1 };
    let s = sur.scale;
    let coef = 1.0 / (2.0 * p.lambda * n as f64);
    let class_of = |y: usize, j: usize| {
        if sur.loss.is_binary() {
            1 - y
        } else if j < y {
            j
        } else {
            j + 1
        }
    };
    let tilt = |i: usize| {
        sur.tilt
            .as_ref()
            .and_then(|(pat, c)| pat[i].map(|j| (j, *c)))
    };

    let mut gamma = match warm {
        Some(g) if g.len() == n * m => g.to_vec(),
        _ => vec![0.0; n * m],
    };
    let mut alpha = vec![0.0; n * k];
    for i in 0..n {
        let y = p.data.label(i) - 1;
        let a = &mut alpha[i * k..(i + 1) * k];
        let mut beta = gamma[i * m..(i + 1) * m].to_vec();
        if let Some((j, c)) = tilt(i) {
            beta[j] -= c;
        }
        for (j, bj) in beta.iter().enumerate() {
            a[y] += coef * sigma * bj;
            a[class_of(y, j)] -= coef * sigma * bj;
        }
    }
    let mut f = vec![0.0; n * k];
    gram.apply(&alpha, k, &mut f, k, k);
    let diag: Vec<f64> = anchors
        .iter()
        .map(|a| kernel.eval_unchecked(a, a))
        .collect();

    let (mut u, mut g) = (vec![0.0; k], vec![0.0; k]);
    let (mut b, mut old) = (vec![0.0; m], vec![0.0; m]);
    let (mut z, mut buf) = (Vec::with_capacity(m), Vec::with_capacity(2 * m + 1));
    let mut da = vec![0.0; k];
    let mut best = f64::INFINITY;
    let mut best_alpha = alpha.clone();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut epochs = 0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    for epoch in 1..=cfg.max_iters.max(1) {
        epochs = epoch;
        order.shuffle(&mut rng);
        for &i in &order {
            if diag[i] <= 0.0 {
                continue;
            }
            let y = p.data.label(i) - 1;
            loss_margins_into(sur.loss, &f[i * k..(i + 1) * k], y, &mut u);
            for (bj, uj) in b.iter_mut().zip(&u) {
                *bj = 1.0 - uj;
            }
            let q = sigma * sigma * diag[i] * coef / 2.0;
            let block = &mut gamma[i * m..(i + 1) * m];
            old.copy_from_slice(block);
            block_update(set, s, block, &b, q, &mut z, &mut buf);
            da.iter_mut().for_each(|v| *v = 0.0);
            for j in 0..m {
                let d = coef * sigma * (block[j] - old[j]);
                da[y] += d;
                da[class_of(y, j)] -= d;
            }
            if da.iter().all(|&v| v == 0.0) {
                continue;
            }
            for (fl, a) in f.chunks_mut(k).zip(anchors) {
                let kv = kernel.eval_unchecked(&anchors[i], a);
                for (fc, dc) in fl.iter_mut().zip(&da) {
                    *fc += kv * dc;
                }
            }
            for (a, dc) in alpha[i * k..(i + 1) * k].iter_mut().zip(&da) {
                *a += dc;
            }
        }
        // refresh to keep rounding from accumulating in f
        gram.apply(&alpha, k, &mut f, k, k);
        let pen: f64 = alpha.iter().zip(&f).map(|(a, v)| a * v).sum();
        let primal = p.loss(sur, &f, None, &mut u, &mut g) + p.lambda * pen;
        let dual = gamma.iter().sum::<f64>() / n as f64 - p.lambda * pen;
        if primal < best {
            best = primal;
            best_alpha.copy_from_slice(&alpha);
        }
        trace.push(best);
        if primal - dual <= cfg.rel_tol * (1.0 + primal.abs()) {
            converged = true;
            break;
        }
    }
    let theta = best_alpha
        .chunks(k)
        .flat_map(|row| row[..k - 1].iter().copied())
        .collect();
    Some(Inner {
        theta,
        trace,
        converged,
        iterations: epochs,
        dual: Some(gamma),
    })
}

/// Exact dual ascent where it applies, the subgradient method otherwise.
fn solve(
    p: &Problem,
    sur: &Surrogate,
    init: Vec<f64>,
    warm: Option<&[f64]>,
    cfg: &FitConfig,
) -> Inner {
    dual_minimize(p, sur, cfg, warm).unwrap_or_else(|| minimize(p, sur, init, cfg))
}

fn check_data<'a>(config: &FitConfig, data: &'a Dataset) -> Result<Problem<'a>> {
    if data.is_empty() {
        return domain("cannot fit an empty dataset");
    }
    Problem::new(config, data)
}

/// Exact penalized empirical cost of `decision`.
pub fn objective(config: &FitConfig, data: &Dataset, decision: &Decision) -> Result<f64> {
    if data.is_empty() {
        return domain("objective of an empty dataset");
    }
    if decision.class_count() != data.class_count() || decision.input_dim() != data.dim() {
        return domain("decision does not match the data's classes or dimension");
    }
    if config.loss.is_binary() && data.class_count() != 2 {
        return Err(Error::UnsupportedLoss(
            config.loss,
            "binary losses need two classes",
        ));
    }
    let pen = penalty_eval(config.penalty, decision)?;
    let k = data.class_count();
    let (mut f, mut u) = (vec![0.0; k], vec![0.0; k]);
    let mut total = 0.0;
    for (x, y) in data.iter() {
        decision.eval_into(x, &mut f);
        let m = loss_margins_into(config.loss, &f, y - 1, &mut u);
        total += value(config.loss, &u[..m]);
    }
    Ok(total / data.len() as f64 + config.lambda * pen)
}

/// Minimizes the cost for a convex (or, for `SquaredMin`, best-effort
/// local) loss.
pub fn fit_convex(config: &FitConfig, data: &Dataset) -> Result<FitReport> {
    match config.loss {
        LossId::Psi | LossId::BinaryPsi => {
            return Err(Error::UnsupportedLoss(
                config.loss,
                "use the difference-of-convex fit for ψ-losses",
            ))
        }
        LossId::ZeroOne => {
            return Err(Error::UnsupportedLoss(
                config.loss,
                "the 0-1 loss cannot be fitted",
            ))
        }
        _ => {}
    }
    let p = check_data(config, data)?;
    let inner = solve(
        &p,
        &Surrogate::plain(config.loss),
        vec![0.0; p.dim()],
        None,
        config,
    );
    Ok(FitReport {
        decision: p.decision(&inner.theta)?,
        objective_trace: inner.trace,
        converged: inner.converged,
        iterations_used: inner.iterations,
    })
}

/// Per-sample index of the margin carrying the concave part's slope, or
/// `None` where that part is flat.
fn tilt_pattern(p: &Problem, loss: LossId, th: &[f64]) -> Vec<Option<usize>> {
    let mut f = vec![0.0; p.n * p.k];
    p.forward(th, &mut f);
    let mut u = vec![0.0; p.k];
    f.chunks(p.k)
        .enumerate()
        .map(|(i, fi)| {
            let m = loss_margins_into(loss, fi, p.data.label(i) - 1, &mut u);
            let j = argmin_lowest(&u[..m]);
            (u[j] < 0.0).then_some(j)
        })
        .collect()
}

/// Difference-of-convex minimization for the ψ-losses, started from the
/// convex fit under the multi-class hinge `Svm3` (for `Psi`) or the binary
/// hinge (for `BinaryPsi`) with the same penalty and `λ`.
pub fn fit_dc(config: &FitConfig, data: &Dataset) -> Result<FitReport> {
    let (init_loss, surrogate_scale, tilt) = match config.loss {
        LossId::Psi => (LossId::Svm3, 2.0, 2.0),
        LossId::BinaryPsi => (LossId::BinaryHinge, 1.0, 1.0),
        other => {
            return Err(Error::UnsupportedLoss(
                other,
                "the difference-of-convex fit handles ψ-losses only",
            ))
        }
    };
    let p = check_data(config, data)?;
    let truth = Surrogate::plain(config.loss);
    let start = solve(
        &p,
        &Surrogate::plain(init_loss),
        vec![0.0; p.dim()],
        None,
        config,
    );
    let mut iterations = start.iterations;
    // the dual of the unit-scale start, rescaled into the surrogate's set
    let mut dual = start.dual.map(|g| {
        g.into_iter()
            .map(|v| v * surrogate_scale)
            .collect::<Vec<_>>()
    });
    let mut th = start.theta;
    let mut w = Work::new(&p);
    let mut obj = w.objective(&p, &truth, &th);
    let mut trace = vec![obj];
    let mut pattern = tilt_pattern(&p, config.loss, &th);
    let mut converged = config.dc_max_outer == 0;
    for _ in 0..config.dc_max_outer {
        let sur = Surrogate {
            loss: init_loss,
            scale: surrogate_scale,
            tilt: Some((pattern.clone(), tilt)),
        };
        let inner = solve(&p, &sur, th.clone(), dual.as_deref(), config);
        iterations += inner.iterations;
        let new_obj = w.objective(&p, &truth, &inner.theta);
        if new_obj > obj {
            // the surrogate majorizes the objective, so this only happens
            // when the inner solve failed to improve on its start
            converged = true;
            break;
        }
        let decrease = obj - new_obj;
        th = inner.theta;
        dual = inner.dual;
        obj = new_obj;
        trace.push(obj);
        let next = tilt_pattern(&p, config.loss, &th);
        if decrease < config.rel_tol * (1.0 + obj.abs()) || next == pattern {
            converged = true;
            break;
        }
        pattern = next;
    }
    Ok(FitReport {
        decision: p.decision(&th)?,
        objective_trace: trace,
        converged,
        iterations_used: iterations,
    })
}

/// Dispatches to [`fit_dc`] for ψ-losses and [`fit_convex`] otherwise.
pub fn fit(config: &FitConfig, data: &Dataset) -> Result<FitReport> {
    if config.loss.is_psi() {
        fit_dc(config, data)
    } else {
        fit_convex(config, data)
    }
}
