//! Four-class world on `[-1, 1]²` with density `λ min(|x1|, |x2|)^γ`.
//!
//! For homogeneous linear rules `f(x) = W x` the argmax depends on the
//! direction of `x` only, so misclassification probabilities reduce to
//! angular masses, and V-risks to a polar integral whose radial part is
//! piecewise smooth with known kinks.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{domain, Error, Result};
use crate::margin::{argmax_lowest, LossId};
use crate::model::{DecisionFn, LinearDecision};
use crate::quad::{integrate_split, GaussLegendre};

use super::spec::ex52_region;
use super::{cond_risk, ExampleSpec};

const TAU: f64 = 2.0 * PI;

pub(crate) fn params(spec: &ExampleSpec) -> Result<(f64, f64)> {
    match *spec {
        ExampleSpec::Ex52 { theta, gamma } => Ok((theta, gamma)),
        _ => domain(format!(
            "expected the four-class planar world, got {}",
            spec.name()
        )),
    }
}

/// Density normalizer `(γ+1)(γ+2)/8`.
pub fn normalizer(gamma: f64) -> f64 {
    (gamma + 1.0) * (gamma + 2.0) / 8.0
}

/// Probability mass of the sector `[0, φ)`, `φ ∈ [0, 2π]`.
pub(crate) fn sector_cdf(gamma: f64, phi: f64) -> f64 {
    let phi = phi.clamp(0.0, TAU);
    let o = ((phi / FRAC_PI_4).floor() as i64).min(7);
    let psi = phi - o as f64 * FRAC_PI_4;
    let within = if o % 2 == 0 {
        psi.tan().max(0.0).powf(gamma + 1.0)
    } else {
        1.0 - (FRAC_PI_4 - psi).tan().max(0.0).powf(gamma + 1.0)
    };
    (o as f64 + within) / 8.0
}

fn norm_angle(phi: f64) -> f64 {
    let p = phi.rem_euclid(TAU);
    if p >= TAU {
        0.0
    } else {
        p
    }
}

/// Angles in `[0, 2π)` where `d · (cos φ, sin φ) = 0`.
fn zero_angles(d: [f64; 2], out: &mut Vec<f64>) {
    if d[0] != 0.0 || d[1] != 0.0 {
        let base = d[1].atan2(d[0]);
        out.push(norm_angle(base + FRAC_PI_2));
        out.push(norm_angle(base - FRAC_PI_2));
    }
}

fn slope_rows(dec: &LinearDecision) -> Vec<[f64; 2]> {
    dec.slopes().iter().map(|r| [r[0], r[1]]).collect()
}

/// Angular breakpoints: octant boundaries, pairwise ties and sign changes
/// of every class score.
fn angular_cuts(rows: &[[f64; 2]]) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..=8).map(|o| o as f64 * FRAC_PI_4).collect();
    for (i, ri) in rows.iter().enumerate() {
        zero_angles(*ri, &mut cuts);
        for rj in &rows[i + 1..] {
            zero_angles([ri[0] - rj[0], ri[1] - rj[1]], &mut cuts);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    cuts
}

fn requires_homogeneous(dec: &LinearDecision) -> Result<()> {
    if dec.input_dim() != 2 || dec.class_count() != 4 {
        return domain("the planar world needs a four-class decision on two inputs");
    }
    Ok(())
}

/// Exact misclassification probability of a homogeneous linear rule.
pub(crate) fn ge_homogeneous(spec: &ExampleSpec, dec: &LinearDecision) -> Result<f64> {
    let (theta, gamma) = params(spec)?;
    requires_homogeneous(dec)?;
    let rows = slope_rows(dec);
    let cuts = angular_cuts(&rows);
    let mut mismatch = 0.0;
    let mut f = [0.0; 4];
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        let x = [mid.cos(), mid.sin()];
        dec.eval_into(&x, &mut f);
        if argmax_lowest(&f) != ex52_region(&x) {
            mismatch += sector_cdf(gamma, w[1]) - sector_cdf(gamma, w[0]);
        }
    }
    Ok((1.0 - theta) + (theta - (1.0 - theta) / 3.0) * mismatch)
}

fn probs(theta: f64, region: usize) -> [f64; 4] {
    let mut p = [(1.0 - theta) / 3.0; 4];
    p[region] = theta;
    p
}

/// Polar-coordinate V-risk of a homogeneous linear rule.
pub(crate) fn v_risk_homogeneous(
    spec: &ExampleSpec,
    loss: LossId,
    dec: &LinearDecision,
    tol: f64,
) -> Result<f64> {
    let (theta, gamma) = params(spec)?;
    requires_homogeneous(dec)?;
    if loss.is_binary() {
        return Err(Error::UnsupportedLoss(
            loss,
            "binary losses need two classes",
        ));
    }
    let rows = slope_rows(dec);
    let lambda = normalizer(gamma);
    let gl = GaussLegendre::new(20);
    let inner = |phi: f64| -> f64 {
        let (s, c) = phi.sin_cos();
        let rmax = 1.0 / c.abs().max(s.abs());
        let mfac = c.abs().min(s.abs()).powf(gamma);
        if mfac == 0.0 {
            return 0.0;
        }
        let x = [c, s];
        let p = probs(theta, ex52_region(&x));
        let mut g = [0.0; 4];
        for (gc, r) in g.iter_mut().zip(&rows) {
            *gc = r[0] * c + r[1] * s;
        }
        let mut radii: [f64; 12] = [0.0; 12];
        let mut nr = 0;
        radii[nr] = 0.0;
        nr += 1;
        let mut push = |v: f64| {
            if v != 0.0 {
                let r = 1.0 / v.abs();
                if r < rmax {
                    radii[nr] = r;
                    nr += 1;
                }
            }
        };
        for i in 0..4 {
            push(g[i]);
            for j in i + 1..4 {
                push(g[i] - g[j]);
            }
        }
        radii[nr] = rmax;
        nr += 1;
        let radii = &mut radii[..nr];
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut total = 0.0;
        let mut f = [0.0; 4];
        for w in radii.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            for (r, wt) in gl.mapped(w[0], w[1]) {
                for (fc, gc) in f.iter_mut().zip(&g) {
                    *fc = r * gc;
                }
                total += wt * r.powf(gamma + 1.0) * cond_risk(loss, &f, &p);
            }
        }
        lambda * mfac * total
    };
    let v = integrate_split(inner, 0.0, TAU, &angular_cuts(&rows), tol);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow("V-risk quadrature overflowed".into()))
    }
}

/// Tensor Gauss–Legendre V-risk for any planar decision; returns the value
/// at `nodes` per axis and per quadrant together with the difference to the
/// half-resolution rule as an error indicator.
pub(crate) fn v_risk_tensor(
    spec: &ExampleSpec,
    loss: LossId,
    dec: &dyn DecisionFn,
    nodes: usize,
) -> Result<(f64, f64)> {
    let (theta, gamma) = params(spec)?;
    if loss.is_binary() {
        return Err(Error::UnsupportedLoss(
            loss,
            "binary losses need two classes",
        ));
    }
    let lambda = normalizer(gamma);
    let rule = |n: usize| -> f64 {
        let gl = GaussLegendre::new(n);
        let mut total = 0.0;
        let mut f = [0.0; 4];
        for (lo1, hi1) in [(0.0, 1.0), (-1.0, 0.0)] {
            for (lo2, hi2) in [(0.0, 1.0), (-1.0, 0.0)] {
                for (x1, w1) in gl.mapped(lo1, hi1) {
                    for (x2, w2) in gl.mapped(lo2, hi2) {
                        let x = [x1, x2];
                        dec.eval_into(&x, &mut f);
                        let q = lambda * x1.abs().min(x2.abs()).powf(gamma);
                        total += w1 * w2 * q * cond_risk(loss, &f, &probs(theta, ex52_region(&x)));
                    }
                }
            }
        }
        total
    };
    let fine = rule(nodes);
    let coarse = rule(nodes / 2);
    if !fine.is_finite() {
        return Err(Error::Overflow("V-risk quadrature overflowed".into()));
    }
    Ok((fine, (fine - coarse).abs()))
}

fn poly(theta: f64, x: f64) -> f64 {
    let t = theta - 1.0;
    9.0 * t - 16.0 * t * x + 12.0 * t * x * x + (64.0 * theta - 4.0) * x.powi(4)
}

/// Scan range and step for [`quartic_root`].
pub const ROOT_SCAN_LOWER: f64 = -10.0;
pub const ROOT_SCAN_STEP: f64 = 1e-3;

/// Negative root closest to zero of
/// `9(θ−1) − 16(θ−1)x + 12(θ−1)x² + (64θ−4)x⁴`, by a downward sign-change
/// scan from 0 followed by bisection.
pub fn quartic_root(theta: f64) -> Result<f64> {
    if !(theta > 0.25 && theta < 1.0) {
        return domain(format!("theta must lie in (1/4, 1), got {theta}"));
    }
    let steps = (-ROOT_SCAN_LOWER / ROOT_SCAN_STEP).round() as usize;
    let mut hi = 0.0;
    let mut phi = poly(theta, hi);
    for i in 1..=steps {
        let lo = -(i as f64) * ROOT_SCAN_STEP;
        let plo = poly(theta, lo);
        if plo == 0.0 {
            return Ok(lo);
        }
        if plo.signum() != phi.signum() {
            let (mut a, mut b) = (lo, hi);
            let pa = plo;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let pm = poly(theta, m);
                if pm == 0.0 {
                    return Ok(m);
                }
                if pm.signum() == pa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            let r = if poly(theta, a).abs() < poly(theta, b).abs() {
                a
            } else {
                b
            };
            return Ok(r);
        }
        hi = lo;
        phi = plo;
    }
    Err(Error::Oracle(format!(
        "no negative root in ({ROOT_SCAN_LOWER}, 0) for theta = {theta}"
    )))
}

/// Residual of the quartic at `x`.
pub fn quartic_residual(theta: f64, x: f64) -> f64 {
    poly(theta, x)
}

/// Free slope pattern `(w11, w12, w21, w22, w31, w32)` whose multiples are
/// the stated hinge-risk minimizers.
pub const STATED_PATTERN: [f64; 6] = [1.0, 1.0, -1.0, 1.0, -1.0, -1.0];

/// Homogeneous linear rule `s · pattern` on the free slopes.
pub fn ray_decision(pattern: &[f64; 6], s: f64) -> LinearDecision {
    LinearDecision::from_free(4, 2, pattern.iter().map(|v| v * s).collect(), vec![0.0; 3])
        .expect("finite pattern")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sector_masses() {
        for g in [0.0, 1.0, 2.5] {
            assert_abs_diff_eq!(sector_cdf(g, TAU), 1.0, epsilon = 1e-15);
            for q in 0..4 {
                let m =
                    sector_cdf(g, (q + 1) as f64 * FRAC_PI_2) - sector_cdf(g, q as f64 * FRAC_PI_2);
                assert_abs_diff_eq!(m, 0.25, epsilon = 1e-15);
            }
        }
        // uniform density: sector [0, φ) of the square for small φ has area tan(φ)/2 out of 4
        let phi: f64 = 0.3;
        assert_abs_diff_eq!(sector_cdf(0.0, phi), phi.tan() / 8.0, epsilon = 1e-15);
    }

    #[test]
    fn normalizer_integrates_to_one() {
        for g in [0.0, 1.0, 2.0, 3.5] {
            let gl = GaussLegendre::new(200);
            let mut total = 0.0;
            // split the unit square quadrant along the diagonal where min() kinks
            for (x1, w1) in gl.mapped(0.0, 1.0) {
                let lower = gl.integrate(|x2: f64| x2.powf(g), 0.0, x1);
                total += w1 * (lower + x1.powf(g) * (1.0 - x1));
            }
            assert_abs_diff_eq!(4.0 * normalizer(g) * total, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn quartic_examples() {
        for theta in [0.3, 0.5, 0.7, 0.9] {
            let r = quartic_root(theta).unwrap();
            assert!(r < 0.0);
            assert!(quartic_residual(theta, r).abs() < 1e-10);
        }
        assert_abs_diff_eq!(quartic_root(0.5).unwrap(), -0.86928053, epsilon = 1e-7);
        assert_abs_diff_eq!(quartic_root(0.7).unwrap(), -0.65163216, epsilon = 1e-7);
        assert!(quartic_root(0.2).is_err());
    }

    #[test]
    fn bayes_pattern_has_bayes_risk() {
        let spec = ExampleSpec::ex52(0.7, 0.0).unwrap();
        let dec = ray_decision(&[1.0, 1.0, 1.0, -1.0, -1.0, 1.0], 1.0);
        assert_abs_diff_eq!(ge_homogeneous(&spec, &dec).unwrap(), 0.3, epsilon = 1e-14);
        let zero = LinearDecision::zeros(4, 2).unwrap();
        assert_abs_diff_eq!(ge_homogeneous(&spec, &zero).unwrap(), 0.75, epsilon = 1e-14);
    }

    #[test]
    fn polar_matches_tensor_rule() {
        for g in [0.0, 2.0] {
            let spec = ExampleSpec::ex52(0.7, g).unwrap();
            let dec = ray_decision(&[0.9, 0.4, -0.3, 1.2, -0.8, -0.5], 1.0);
            for loss in [LossId::Svm2, LossId::Svm1, LossId::Logit, LossId::Psi] {
                let polar = v_risk_homogeneous(&spec, loss, &dec, 1e-11).unwrap();
                let (tensor, err) = v_risk_tensor(&spec, loss, &dec, 200).unwrap();
                assert!(
                    (polar - tensor).abs() < 1e-5 + 10.0 * err,
                    "{loss} γ={g}: {polar} vs {tensor}"
                );
            }
        }
    }
}
