//! Exact population quantities for the four example worlds: Bayes rules
//! and risks, misclassification and V-risks, ideal minimizers and regrets.
//!
//! Quantities are exact (closed form or deterministic quadrature) wherever
//! the geometry allows; otherwise a Monte Carlo estimate with a fixed,
//! documented seed is returned together with its standard error.

mod ex51;
mod ex52;
pub(crate) mod spec;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::datagen::make_generator;
use crate::error::{domain, Error, Result};
use crate::margin::{argmax_lowest, loss_margins_into, margin_grad_to_f, subgrad, value, LossId};
use crate::model::{Decision, DecisionFn, LinearDecision};
use crate::quad::integrate_split;

pub use ex51::{
    ideal_minimizer_1d, ideal_minimizer_1d_with, misclass_risk_linear_1d, IdealPoint, IdealSearch,
    PSI_PINNED_SLOPE,
};
pub use ex52::{
    normalizer as planar_normalizer, quartic_residual, quartic_root, ray_decision, ROOT_SCAN_LOWER,
    ROOT_SCAN_STEP, STATED_PATTERN,
};
pub use spec::ExampleSpec;

/// Monte Carlo sample size used by the oracle.
pub const MC_DRAWS: usize = 1_000_000;
/// Seed of every oracle Monte Carlo stream.
pub const MC_SEED: u64 = 0x6f72_6163_6c65;

const MAXK: usize = 4;
const QUAD_TOL_1D: f64 = 1e-10;
const QUAD_TOL_POLAR: f64 = 1e-11;
const TENSOR_NODES: usize = 200;

/// A value with its standard error (zero for exact computations).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0 }
    }
}

/// `Σ_c p_c V(f, c)` at a single input.
#[inline]
pub(crate) fn cond_risk(loss: LossId, f: &[f64], probs: &[f64]) -> f64 {
    debug_assert!(f.len() <= MAXK);
    let mut u = [0.0; MAXK];
    let mut total = 0.0;
    for (c, &p) in probs.iter().enumerate() {
        if p != 0.0 {
            let m = loss_margins_into(loss, f, c, &mut u);
            total += p * value(loss, &u[..m]);
        }
    }
    total
}

/// Gradient of [`cond_risk`] with respect to the `k` decision values.
pub(crate) fn cond_risk_grad(loss: LossId, f: &[f64], probs: &[f64], df: &mut [f64]) {
    let k = f.len();
    debug_assert!(k <= MAXK);
    let (mut u, mut g, mut tmp) = ([0.0; MAXK], [0.0; MAXK], [0.0; MAXK]);
    df.iter_mut().for_each(|v| *v = 0.0);
    for (c, &p) in probs.iter().enumerate() {
        if p != 0.0 {
            let m = loss_margins_into(loss, f, c, &mut u);
            subgrad(loss, &u[..m], &mut g[..m]);
            margin_grad_to_f(loss, &g[..m], c, &mut tmp[..k]);
            for (d, t) in df.iter_mut().zip(&tmp[..k]) {
                *d += p * t;
            }
        }
    }
}

fn check_decision(spec: &ExampleSpec, dec: &dyn DecisionFn) -> Result<()> {
    if dec.class_count() != spec.class_count() || dec.input_dim() != spec.input_dim() {
        return domain(format!(
            "decision has {} classes on {} inputs; {} needs {} classes on {}",
            dec.class_count(),
            dec.input_dim(),
            spec.name(),
            spec.class_count(),
            spec.input_dim()
        ));
    }
    Ok(())
}

fn check_loss(spec: &ExampleSpec, loss: LossId) -> Result<()> {
    if loss.is_binary() && spec.class_count() != 2 {
        return Err(Error::UnsupportedLoss(
            loss,
            "binary losses need a two-class world",
        ));
    }
    Ok(())
}

/// Bayes decision vector: `(k-1)/k` at the most probable class, `-1/k`
/// elsewhere.
pub fn bayes_rule(spec: &ExampleSpec, x: &[f64]) -> Result<Vec<f64>> {
    let p = spec.class_probs(x)?;
    Ok(bayes_from_probs(&p))
}

fn bayes_from_probs(p: &[f64]) -> Vec<f64> {
    let k = p.len() as f64;
    let mode = argmax_lowest(p);
    (0..p.len())
        .map(|c| if c == mode { (k - 1.0) / k } else { -1.0 / k })
        .collect()
}

/// Minimal misclassification probability.
pub fn bayes_risk(spec: &ExampleSpec) -> f64 {
    match *spec {
        ExampleSpec::Ex51 { theta1, theta2, .. } => 0.5 * (1.0 - theta1 + theta2),
        ExampleSpec::Ex52 { theta, .. } => 1.0 - theta,
        ExampleSpec::Ex53 { .. } => 6.0 / 11.0,
        ExampleSpec::Ex54 { tau, .. } => 1.0 - tau,
    }
}

/// Regions on which the class probabilities are constant, as
/// `(probability mass, representative input)`.
fn constant_regions(spec: &ExampleSpec) -> Vec<(f64, Vec<f64>)> {
    match *spec {
        ExampleSpec::Ex51 { .. } => vec![(0.5, vec![0.5]), (0.5, vec![-0.5])],
        ExampleSpec::Ex52 { .. } => [[0.5, 0.5], [0.5, -0.5], [-0.5, 0.5], [-0.5, -0.5]]
            .iter()
            .map(|x| (0.25, x.to_vec()))
            .collect(),
        ExampleSpec::Ex53 { .. } => [1.0 / 6.0, 0.5, 5.0 / 6.0]
            .iter()
            .map(|&x| (1.0 / 3.0, vec![x]))
            .collect(),
        ExampleSpec::Ex54 { p, .. } => {
            let mut pos = vec![0.0; p];
            pos[0] = 0.5;
            let mut neg = vec![0.0; p];
            neg[0] = -0.5;
            vec![(0.5, pos), (0.5, neg)]
        }
    }
}

/// V-risk of the Bayes rule, which is constant on each probability region.
pub fn bayes_v_risk(spec: &ExampleSpec, loss: LossId) -> Result<f64> {
    check_loss(spec, loss)?;
    let k = spec.class_count();
    let mut p = vec![0.0; k];
    let mut total = 0.0;
    for (mass, x) in constant_regions(spec) {
        spec.class_probs_into(&x, &mut p);
        total += mass * cond_risk(loss, &bayes_from_probs(&p), &p);
    }
    Ok(total)
}

/// Pieces of a one-dimensional support with constant class probabilities.
fn pieces_1d(spec: &ExampleSpec) -> Result<Vec<(f64, f64)>> {
    match spec {
        ExampleSpec::Ex51 { .. } => Ok(vec![(-1.0, 0.0), (0.0, 1.0)]),
        ExampleSpec::Ex53 { .. } => Ok(vec![
            (0.0, 1.0 / 3.0),
            (1.0 / 3.0, 2.0 / 3.0),
            (2.0 / 3.0, 1.0),
        ]),
        _ => domain(format!("{} is not one-dimensional", spec.name())),
    }
}

fn mass_1d(spec: &ExampleSpec, lo: f64, hi: f64) -> f64 {
    match *spec {
        ExampleSpec::Ex51 { gamma, .. } => ex51::cdf(gamma, hi) - ex51::cdf(gamma, lo),
        _ => hi - lo,
    }
}

fn density_1d(spec: &ExampleSpec, x: f64) -> f64 {
    match *spec {
        ExampleSpec::Ex51 { gamma, .. } => 0.5 * (gamma + 1.0) * x.abs().powf(gamma),
        _ => 1.0,
    }
}

fn kernel_cuts(dec: &Decision) -> Vec<f64> {
    match dec {
        Decision::Kernel(kd) => kd.anchors().iter().map(|a| a[0]).collect(),
        Decision::Linear(_) => Vec::new(),
    }
}

/// Misclassification probability of any rule on a one-dimensional world:
/// the support is partitioned where the predicted class changes (located
/// by bisection from a fine initial grid refined at `cuts`).
fn ge_1d(spec: &ExampleSpec, dec: &dyn DecisionFn, cuts: &[f64]) -> Result<f64> {
    let k = spec.class_count();
    let mut f = vec![0.0; k];
    let mut p = vec![0.0; k];
    let mut class_at = |x: f64| {
        dec.eval_into(&[x], &mut f);
        argmax_lowest(&f)
    };
    let grid = 256.max(4 * cuts.len());
    let mut total = 0.0;
    for (lo, hi) in pieces_1d(spec)? {
        spec.class_probs_into(&[0.5 * (lo + hi)], &mut p);
        let mut pts: Vec<f64> = (0..=grid)
            .map(|i| lo + (hi - lo) * i as f64 / grid as f64)
            .collect();
        pts.extend(cuts.iter().copied().filter(|&c| c > lo && c < hi));
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        let classes: Vec<usize> = pts.iter().map(|&x| class_at(x)).collect();
        let mut stack = Vec::new();
        for i in 0..pts.len() - 1 {
            stack.push((pts[i], pts[i + 1], classes[i], classes[i + 1]));
            while let Some((l, h, cl, ch)) = stack.pop() {
                if cl == ch {
                    total += mass_1d(spec, l, h) * (1.0 - p[cl]);
                    continue;
                }
                let m = 0.5 * (l + h);
                if h - l < 1e-14 || m <= l || m >= h {
                    total +=
                        mass_1d(spec, l, m) * (1.0 - p[cl]) + mass_1d(spec, m, h) * (1.0 - p[ch]);
                    continue;
                }
                let cm = class_at(m);
                stack.push((l, m, cl, cm));
                stack.push((m, h, cm, ch));
            }
        }
    }
    Ok(total)
}

fn v_risk_1d(spec: &ExampleSpec, loss: LossId, dec: &dyn DecisionFn, cuts: &[f64]) -> Result<f64> {
    let k = spec.class_count();
    let pieces = pieces_1d(spec)?;
    let tol = QUAD_TOL_1D / pieces.len() as f64;
    let mut total = 0.0;
    for (lo, hi) in pieces {
        let mut p = [0.0; MAXK];
        spec.class_probs_into(&[0.5 * (lo + hi)], &mut p[..k]);
        let integrand = |x: f64| {
            let mut f = [0.0; MAXK];
            dec.eval_into(&[x], &mut f[..k]);
            density_1d(spec, x) * cond_risk(loss, &f[..k], &p[..k])
        };
        total += integrate_split(integrand, lo, hi, cuts, tol);
    }
    if total.is_finite() {
        Ok(total)
    } else {
        Err(Error::Overflow("V-risk quadrature overflowed".into()))
    }
}

/// Rao–Blackwellized Monte Carlo misclassification probability of a
/// homogeneous linear rule in the sparse-signal world: conditioning on the
/// redundant coordinates leaves a uniform `x1`, so the mismatch
/// probability with the Bayes rule is available in closed form per draw.
fn ge_ex54_linear(tau: f64, dec: &LinearDecision, draws: usize, seed: u64) -> Estimate {
    let w = dec.free_slopes();
    let w1 = w[0];
    let rest: Vec<f64> = w[1..].iter().copied().filter(|&v| v != 0.0).collect();
    let to_ge = |mismatch: f64| (1.0 - tau) + (2.0 * tau - 1.0) * mismatch;
    if w1 == 0.0 {
        // class 1 iff S >= 0, independent of x1
        return Estimate::exact(to_ge(0.5));
    }
    let cond = |s: f64| {
        let m = 0.5 * (s.abs() / w1.abs()).min(1.0);
        if w1 > 0.0 {
            m
        } else {
            1.0 - m
        }
    };
    if rest.is_empty() {
        return Estimate::exact(to_ge(cond(0.0)));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..draws {
        let s: f64 = rest.iter().map(|&v| v * rng.gen_range(-1.0..=1.0)).sum();
        let m = cond(s);
        sum += m;
        sq += m * m;
    }
    let n = draws as f64;
    let mean = sum / n;
    let var = (sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Estimate {
        value: to_ge(mean),
        stderr: (2.0 * tau - 1.0) * (var / n).sqrt(),
    }
}

/// Plain Monte Carlo misclassification probability, averaging the
/// conditional error `1 - p_ŷ(x)` over fresh inputs.
fn ge_mc(spec: &ExampleSpec, dec: &dyn DecisionFn, draws: usize, seed: u64) -> Result<Estimate> {
    let mut gen = make_generator(*spec, seed)?;
    let (k, d) = (spec.class_count(), spec.input_dim());
    let (mut x, mut f, mut p) = (vec![0.0; d], vec![0.0; k], vec![0.0; k]);
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..draws {
        gen.draw_into(&mut x);
        dec.eval_into(&x, &mut f);
        spec.class_probs_into(&x, &mut p);
        let e = 1.0 - p[argmax_lowest(&f)];
        sum += e;
        sq += e * e;
    }
    let n = draws as f64;
    let mean = sum / n;
    let var = (sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Ok(Estimate {
        value: mean,
        stderr: (var / n).sqrt(),
    })
}

/// Misclassification probability `P(Y ≠ argmax_j f_j(X))`.
///
/// Exact for the one-dimensional worlds and for homogeneous linear rules
/// in the planar world; Monte Carlo ([`MC_DRAWS`] draws, seed [`MC_SEED`])
/// otherwise, Rao–Blackwellized for homogeneous linear rules in the
/// sparse-signal world.
pub fn generalization_error(spec: &ExampleSpec, dec: &Decision) -> Result<Estimate> {
    generalization_error_with(spec, dec, MC_DRAWS, MC_SEED)
}

/// [`generalization_error`] with an explicit Monte Carlo budget and seed.
pub fn generalization_error_with(
    spec: &ExampleSpec,
    dec: &Decision,
    draws: usize,
    seed: u64,
) -> Result<Estimate> {
    check_decision(spec, dec)?;
    if draws == 0 {
        return domain("Monte Carlo needs at least one draw");
    }
    match (spec, dec) {
        (ExampleSpec::Ex51 { .. }, Decision::Linear(l)) => {
            let (a, b) = (l.free_slopes()[0], l.free_intercepts()[0]);
            if a != 0.0 {
                misclass_risk_linear_1d(a, b, spec).map(Estimate::exact)
            } else {
                let p = ex51::params(spec)?;
                Ok(Estimate::exact(ex51::constant_rule_risk(
                    &p,
                    argmax_lowest(&[b, -b]),
                )))
            }
        }
        (ExampleSpec::Ex51 { .. } | ExampleSpec::Ex53 { .. }, _) => {
            ge_1d(spec, dec, &kernel_cuts(dec)).map(Estimate::exact)
        }
        (ExampleSpec::Ex52 { .. }, Decision::Linear(l)) if !l.has_intercept() => {
            ex52::ge_homogeneous(spec, l).map(Estimate::exact)
        }
        (ExampleSpec::Ex54 { tau, .. }, Decision::Linear(l)) if !l.has_intercept() => {
            Ok(ge_ex54_linear(*tau, l, draws, seed))
        }
        _ => ge_mc(spec, dec, draws, seed),
    }
}

/// Population V-risk `E V(f(X), Y)` by deterministic quadrature; the
/// standard error field carries the quadrature error indicator where one
/// is available. Not available for the sparse-signal world.
pub fn v_risk_quadrature(spec: &ExampleSpec, loss: LossId, dec: &Decision) -> Result<Estimate> {
    check_decision(spec, dec)?;
    check_loss(spec, loss)?;
    match (spec, dec) {
        (ExampleSpec::Ex51 { .. }, Decision::Linear(l)) => ex51::v_risk_linear(
            spec,
            loss,
            l.free_slopes()[0],
            l.free_intercepts()[0],
            QUAD_TOL_1D,
        )
        .map(Estimate::exact),
        (ExampleSpec::Ex51 { .. } | ExampleSpec::Ex53 { .. }, _) => {
            v_risk_1d(spec, loss, dec, &kernel_cuts(dec)).map(Estimate::exact)
        }
        (ExampleSpec::Ex52 { .. }, Decision::Linear(l)) if !l.has_intercept() => {
            ex52::v_risk_homogeneous(spec, loss, l, QUAD_TOL_POLAR).map(Estimate::exact)
        }
        (ExampleSpec::Ex52 { .. }, _) => {
            let (v, err) = ex52::v_risk_tensor(spec, loss, dec, TENSOR_NODES)?;
            Ok(Estimate {
                value: v,
                stderr: err,
            })
        }
        (ExampleSpec::Ex54 { .. }, _) => Err(Error::NotAvailable(
            "V-risk quadrature in the sparse-signal world".into(),
        )),
    }
}

/// Central-difference gradient of the V-risk over the free parameters
/// (slopes, then intercepts) of a linear rule.
pub fn v_risk_gradient(
    spec: &ExampleSpec,
    loss: LossId,
    dec: &LinearDecision,
    h: f64,
) -> Result<Vec<f64>> {
    let (k, d) = (dec.class_count(), dec.input_dim());
    let w = dec.free_slopes().to_vec();
    let b = dec.free_intercepts().to_vec();
    let with_intercept = dec.has_intercept();
    let eval = |w: Vec<f64>, b: Vec<f64>| -> Result<f64> {
        let l = LinearDecision::from_free(k, d, w, b)?;
        Ok(v_risk_quadrature(spec, loss, &Decision::Linear(l))?.value)
    };
    let mut grad = Vec::new();
    for j in 0..w.len() {
        let (mut wp, mut wm) = (w.clone(), w.clone());
        wp[j] += h;
        wm[j] -= h;
        grad.push((eval(wp, b.clone())? - eval(wm, b.clone())?) / (2.0 * h));
    }
    if with_intercept {
        for j in 0..b.len() {
            let (mut bp, mut bm) = (b.clone(), b.clone());
            bp[j] += h;
            bm[j] -= h;
            grad.push((eval(w.clone(), bp)? - eval(w.clone(), bm)?) / (2.0 * h));
        }
    }
    Ok(grad)
}

/// Minimizes the V-risk of `s · pattern` over `s ∈ [lo, hi]` in the planar
/// world by golden-section search.
pub fn ray_minimizer(
    spec: &ExampleSpec,
    loss: LossId,
    pattern: &[f64; 6],
    lo: f64,
    hi: f64,
) -> Result<(f64, f64)> {
    ex52::params(spec)?;
    let risk = |s: f64| {
        v_risk_quadrature(spec, loss, &Decision::Linear(ray_decision(pattern, s)))
            .map_or(f64::INFINITY, |e| e.value)
    };
    let s = ex51::golden(risk, lo, hi, 1e-9);
    Ok((s, risk(s)))
}

/// What a regret is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// The Bayes rule.
    GlobalBayes,
    /// The population V-risk minimizer over the decision family.
    IdealMinimizer,
}

impl std::fmt::Display for Reference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Reference::GlobalBayes => "bayes",
            Reference::IdealMinimizer => "ideal",
        })
    }
}

/// A reference rule with its population quantities, computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedReference {
    pub reference: Reference,
    /// `None` for the Bayes rule, which is not in either decision family.
    pub decision: Option<Decision>,
    pub ge: f64,
    /// `None` where no V-risk oracle exists.
    pub v_risk: Option<f64>,
}

/// Computes the reference rule for `(spec, loss)`: the Bayes rule always;
/// the ideal minimizer for binary losses in the one-dimensional world and
/// for the stated hinge minimizer in the planar world.
pub fn resolve_reference(
    spec: &ExampleSpec,
    loss: LossId,
    reference: Reference,
) -> Result<ResolvedReference> {
    check_loss(spec, loss)?;
    match reference {
        Reference::GlobalBayes => {
            let v_risk = match spec {
                ExampleSpec::Ex54 { .. } => None,
                _ => Some(bayes_v_risk(spec, loss)?),
            };
            Ok(ResolvedReference {
                reference,
                decision: None,
                ge: bayes_risk(spec),
                v_risk,
            })
        }
        Reference::IdealMinimizer => {
            let dec = match spec {
                ExampleSpec::Ex51 { .. } if loss.is_binary() => {
                    Decision::Linear(ideal_minimizer_1d(loss, spec)?.decision())
                }
                ExampleSpec::Ex52 { theta, .. } if loss == LossId::Svm2 => {
                    Decision::Linear(ray_decision(&STATED_PATTERN, quartic_root(*theta)?))
                }
                _ => {
                    return Err(Error::Oracle(format!(
                        "no ideal minimizer is available for loss `{loss}` in {spec}"
                    )))
                }
            };
            let ge = generalization_error(spec, &dec)?.value;
            let v_risk = Some(v_risk_quadrature(spec, loss, &dec)?.value);
            Ok(ResolvedReference {
                reference,
                decision: Some(dec),
                ge,
                v_risk,
            })
        }
    }
}

/// GE, V-risk and both regrets of a decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretReport {
    pub ge: f64,
    pub v_risk: Option<f64>,
    /// `GE(f) - GE(reference)`.
    pub e: f64,
    /// `V-risk(f) - V-risk(reference)`.
    pub e_v: Option<f64>,
    pub reference: Reference,
}

/// Regrets of `dec` against an already resolved reference.
pub fn regrets_against(
    spec: &ExampleSpec,
    loss: LossId,
    dec: &Decision,
    r: &ResolvedReference,
) -> Result<RegretReport> {
    let ge = generalization_error(spec, dec)?.value;
    let v_risk = match v_risk_quadrature(spec, loss, dec) {
        Ok(e) => Some(e.value),
        Err(Error::NotAvailable(_)) => None,
        Err(e) => return Err(e),
    };
    let e_v = match (v_risk, r.v_risk) {
        (Some(a), Some(b)) => Some(a - b),
        _ => None,
    };
    Ok(RegretReport {
        ge,
        v_risk,
        e: ge - r.ge,
        e_v,
        reference: r.reference,
    })
}

/// `e(f, ref)` and `e_V(f, ref)`.
pub fn regrets(
    spec: &ExampleSpec,
    loss: LossId,
    dec: &Decision,
    reference: Reference,
) -> Result<RegretReport> {
    regrets_against(spec, loss, dec, &resolve_reference(spec, loss, reference)?)
}

/// Predicted exponent of the regret's decay in `n`.
pub fn theory_rate(spec: &ExampleSpec, loss: LossId) -> Result<f64> {
    use LossId::*;
    let rate = match (*spec, loss) {
        (ExampleSpec::Ex51 { .. }, BinaryExp | BinaryLogit | BinaryHinge) => Some(-0.5),
        (ExampleSpec::Ex51 { .. }, BinaryPsi) => Some(-1.0),
        (ExampleSpec::Ex52 { gamma, .. }, Svm2 | Logit) => Some(-(gamma + 1.0) / 2.0),
        (ExampleSpec::Ex53 { .. }, Svm1) => Some(-0.5),
        (ExampleSpec::Ex53 { m }, Psi) => {
            let m = f64::from(m);
            Some(if m == 1.0 {
                -0.5
            } else {
                -2.0 * m / (2.0 * m + 3.0)
            })
        }
        (ExampleSpec::Ex54 { .. }, BinaryHinge) => Some(-0.25),
        _ => None,
    };
    rate.ok_or_else(|| {
        Error::NotAvailable(format!("no predicted rate for loss `{loss}` in {spec}"))
    })
}

/// One exported oracle quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub spec: String,
    pub quantity: String,
    pub value: f64,
    pub stderr: f64,
}

/// Writes rows as CSV with header `spec,quantity,value,stderr`, preceded
/// by an optional comment line.
pub fn write_oracle_csv<W: Write>(
    rows: &[OracleRow],
    comment: Option<&str>,
    mut w: W,
) -> Result<()> {
    if let Some(c) = comment {
        writeln!(w, "{c}")?;
    }
    writeln!(w, "spec,quantity,value,stderr")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.spec, r.quantity, r.value, r.stderr)?;
    }
    Ok(())
}
