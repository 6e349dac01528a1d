//! Generalized functional margins and the margin losses defined on them.
//!
//! For a decision vector `f = (f_1, …, f_k)` and a label `y`, the functional
//! margin is the `(k-1)`-vector `(f_y - f_j)_{j != y}` in increasing order of
//! `j`. Every multi-class loss here is a function `h(u)` of that vector. The
//! two-class tags (`BinaryExp`, `BinaryLogit`, `BinaryHinge`, `BinaryPsi`)
//! act on the scalar margin `y·f` of a decision `(f, -f)` coded `y = ±1`,
//! which is one half of the two-class functional margin.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};

/// The `(k-1)`-vector of margin differences for one labelled point.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginVector(Vec<f64>);

impl MarginVector {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if u.is_empty() {
            return domain("a margin vector needs at least one component (k >= 2)");
        }
        if u.iter().any(|v| !v.is_finite()) {
            return domain("margin vector components must be finite");
        }
        Ok(Self(u))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Ambient class count `k = len + 1`.
    pub fn class_count(&self) -> usize {
        self.0.len() + 1
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Tagged choice of margin loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossId {
    /// `log(1 + Σ exp(-u_j))`
    Logit,
    /// `Σ [1 - u_j]_+`
    Svm1,
    /// `Σ [Σ_c u_c / k - u_j + 1]_+`
    Svm2,
    /// `[1 - min u]_+`
    Svm3,
    /// `ψ(min u)` with `ψ = 2` below 0, `2(1 - x)` on `[0, 1]`, 0 above 1.
    Psi,
    /// `(1 - min u)^2`
    SquaredMin,
    /// `I[min u < 0]`
    ZeroOne,
    /// `exp(-u)`
    BinaryExp,
    /// `log(1 + exp(-u))`
    BinaryLogit,
    /// `[1 - u]_+`
    BinaryHinge,
    /// `I[u <= 0] + (1 - u) I[0 < u <= 1]`
    BinaryPsi,
}

impl LossId {
    pub const ALL: [LossId; 11] = [
        LossId::Logit,
        LossId::Svm1,
        LossId::Svm2,
        LossId::Svm3,
        LossId::Psi,
        LossId::SquaredMin,
        LossId::ZeroOne,
        LossId::BinaryExp,
        LossId::BinaryLogit,
        LossId::BinaryHinge,
        LossId::BinaryPsi,
    ];

    /// Config-file name of the loss.
    pub fn name(self) -> &'static str {
        match self {
            LossId::Logit => "logit",
            LossId::Svm1 => "svm1",
            LossId::Svm2 => "svm2",
            LossId::Svm3 => "svm3",
            LossId::Psi => "psi",
            LossId::SquaredMin => "l2min",
            LossId::ZeroOne => "zeroone",
            LossId::BinaryExp => "exp",
            LossId::BinaryLogit => "blogit",
            LossId::BinaryHinge => "hinge",
            LossId::BinaryPsi => "bpsi",
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(
            self,
            LossId::BinaryExp | LossId::BinaryLogit | LossId::BinaryHinge | LossId::BinaryPsi
        )
    }

    /// Convex in `u`. `SquaredMin` is not: `(1 - min u)^2` bends the wrong
    /// way once `min u > 1`.
    pub fn is_convex(self) -> bool {
        matches!(
            self,
            LossId::Logit
                | LossId::Svm1
                | LossId::Svm2
                | LossId::Svm3
                | LossId::BinaryExp
                | LossId::BinaryLogit
                | LossId::BinaryHinge
        )
    }

    pub fn is_psi(self) -> bool {
        matches!(self, LossId::Psi | LossId::BinaryPsi)
    }
}

impl fmt::Display for LossId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LossId::ALL
            .iter()
            .copied()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown loss `{s}`")))
    }
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax_lowest(f: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in f.iter().enumerate().skip(1) {
        if v > f[best] {
            best = j;
        }
    }
    best
}

/// Index of the smallest entry, lowest index on ties.
pub(crate) fn argmin_lowest(u: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in u.iter().enumerate().skip(1) {
        if v < u[best] {
            best = j;
        }
    }
    best
}

fn check_label(k: usize, y: usize) -> Result<()> {
    if k < 2 {
        return domain(format!("need at least two classes, got {k}"));
    }
    if y == 0 || y > k {
        return domain(format!("label {y} outside 1..={k}"));
    }
    Ok(())
}

/// Generalized functional margin of `f` at the 1-based label `y`.
pub fn functional_margin(f: &[f64], y: usize) -> Result<MarginVector> {
    check_label(f.len(), y)?;
    let mut u = vec![0.0; f.len() - 1];
    margins_into(f, y - 1, &mut u);
    Ok(MarginVector(u))
}

/// `out[j] = f[y] - f[c_j]` over the classes `c_j != y` in increasing order;
/// `y` is 0-based here.
#[inline]
pub(crate) fn margins_into(f: &[f64], y: usize, out: &mut [f64]) {
    let fy = f[y];
    let mut j = 0;
    for (c, &fc) in f.iter().enumerate() {
        if c != y {
            out[j] = fy - fc;
            j += 1;
        }
    }
}

/// Margin argument the loss is evaluated on: the functional margin for
/// multi-class tags, `(f_y - f_other) / 2 = y·f` for binary tags.
/// Returns the number of components written.
#[inline]
pub(crate) fn loss_margins_into(loss: LossId, f: &[f64], y: usize, out: &mut [f64]) -> usize {
    if loss.is_binary() {
        debug_assert_eq!(f.len(), 2);
        out[0] = 0.5 * (f[y] - f[1 - y]);
        1
    } else {
        margins_into(f, y, out);
        f.len() - 1
    }
}

/// Back-propagates a margin subgradient `g` (as produced for
/// [`loss_margins_into`]) to a gradient over the `k` decision values.
#[inline]
pub(crate) fn margin_grad_to_f(loss: LossId, g: &[f64], y: usize, df: &mut [f64]) {
    if loss.is_binary() {
        df[y] = 0.5 * g[0];
        df[1 - y] = -0.5 * g[0];
        return;
    }
    let mut j = 0;
    let mut total = 0.0;
    for (c, d) in df.iter_mut().enumerate() {
        if c != y {
            *d = -g[j];
            total += g[j];
            j += 1;
        }
    }
    df[y] = total;
}

#[inline]
fn min_of(u: &[f64]) -> f64 {
    u.iter().copied().fold(f64::INFINITY, f64::min)
}

#[inline]
fn psi(x: f64) -> f64 {
    if x > 1.0 {
        0.0
    } else if x < 0.0 {
        2.0
    } else {
        2.0 * (1.0 - x)
    }
}

/// Unchecked loss value on a margin slice.
#[inline]
pub(crate) fn value(loss: LossId, u: &[f64]) -> f64 {
    match loss {
        LossId::Logit => {
            // log-sum-exp over (0, -u_1, …, -u_{k-1})
            let m = u.iter().fold(0.0_f64, |acc, &v| acc.max(-v));
            let s: f64 = (-m).exp() + u.iter().map(|&v| (-v - m).exp()).sum::<f64>();
            m + s.ln()
        }
        LossId::Svm1 => u.iter().map(|&v| (1.0 - v).max(0.0)).sum(),
        LossId::Svm2 => {
            let k = (u.len() + 1) as f64;
            let mean = u.iter().sum::<f64>() / k;
            u.iter().map(|&v| (mean - v + 1.0).max(0.0)).sum()
        }
        LossId::Svm3 => (1.0 - min_of(u)).max(0.0),
        LossId::Psi => psi(min_of(u)),
        LossId::SquaredMin => {
            let r = 1.0 - min_of(u);
            r * r
        }
        LossId::ZeroOne => {
            if min_of(u) < 0.0 {
                1.0
            } else {
                0.0
            }
        }
        LossId::BinaryExp => (-u[0]).exp(),
        LossId::BinaryLogit => {
            let v = u[0];
            if v > 0.0 {
                (-v).exp().ln_1p()
            } else {
                -v + v.exp().ln_1p()
            }
        }
        LossId::BinaryHinge => (1.0 - u[0]).max(0.0),
        LossId::BinaryPsi => {
            let v = u[0];
            if v <= 0.0 {
                1.0
            } else if v <= 1.0 {
                1.0 - v
            } else {
                0.0
            }
        }
    }
}

/// Unchecked subgradient on a margin slice. `ZeroOne` writes zeros.
#[inline]
pub(crate) fn subgrad(loss: LossId, u: &[f64], g: &mut [f64]) {
    g.iter_mut().for_each(|v| *v = 0.0);
    match loss {
        LossId::Logit => {
            let m = u.iter().fold(0.0_f64, |acc, &v| acc.max(-v));
            let z0 = (-m).exp();
            let mut s = z0;
            for (gj, &v) in g.iter_mut().zip(u) {
                let e = (-v - m).exp();
                *gj = -e;
                s += e;
            }
            g.iter_mut().for_each(|v| *v /= s);
        }
        LossId::Svm1 => {
            for (gj, &v) in g.iter_mut().zip(u) {
                if 1.0 - v > 0.0 {
                    *gj = -1.0;
                }
            }
        }
        LossId::Svm2 => {
            let k = (u.len() + 1) as f64;
            let mean = u.iter().sum::<f64>() / k;
            let mut active = 0usize;
            for (gj, &v) in g.iter_mut().zip(u) {
                if mean - v + 1.0 > 0.0 {
                    *gj = -1.0;
                    active += 1;
                }
            }
            let share = active as f64 / k;
            g.iter_mut().for_each(|v| *v += share);
        }
        LossId::Svm3 => {
            let i = argmin_lowest(u);
            if 1.0 - u[i] > 0.0 {
                g[i] = -1.0;
            }
        }
        LossId::Psi => {
            let i = argmin_lowest(u);
            if u[i] > 0.0 && u[i] < 1.0 {
                g[i] = -2.0;
            }
        }
        LossId::SquaredMin => {
            let i = argmin_lowest(u);
            g[i] = -2.0 * (1.0 - u[i]);
        }
        LossId::ZeroOne => {}
        LossId::BinaryExp => g[0] = -(-u[0]).exp(),
        LossId::BinaryLogit => {
            let v = u[0];
            g[0] = if v > 0.0 {
                let e = (-v).exp();
                -e / (1.0 + e)
            } else {
                -1.0 / (1.0 + v.exp())
            };
        }
        LossId::BinaryHinge => {
            if 1.0 - u[0] > 0.0 {
                g[0] = -1.0;
            }
        }
        LossId::BinaryPsi => {
            if u[0] > 0.0 && u[0] < 1.0 {
                g[0] = -1.0;
            }
        }
    }
}

fn check_binary_len(loss: LossId, u: &MarginVector) -> Result<()> {
    if loss.is_binary() && u.len() != 1 {
        return domain(format!(
            "binary loss `{loss}` needs a scalar margin, got {} components",
            u.len()
        ));
    }
    Ok(())
}

/// Evaluates the margin loss `h(u)`.
pub fn loss_eval(loss: LossId, u: &MarginVector) -> Result<f64> {
    check_binary_len(loss, u)?;
    Ok(value(loss, &u.0))
}

/// An element of the subdifferential of `h` at `u` (the gradient where `h`
/// is smooth). At hinge kinks the flat branch is taken; min-based losses
/// put the derivative on the lowest-index minimizing coordinate.
pub fn loss_subgrad_u(loss: LossId, u: &MarginVector) -> Result<Vec<f64>> {
    if loss == LossId::ZeroOne {
        return Err(Error::UnsupportedLoss(
            loss,
            "the 0-1 loss has no useful subgradient",
        ));
    }
    check_binary_len(loss, u)?;
    let mut g = vec![0.0; u.len()];
    subgrad(loss, &u.0, &mut g);
    Ok(g)
}

/// Difference-of-convex split of the ψ-loss: `(2(1 - m)_+, 2(-m)_+)` with
/// `m = min u`, so that `h_ψ(u) = first - second`.
pub fn dc_components(u: &MarginVector) -> (f64, f64) {
    let m = min_of(&u.0);
    (2.0 * (1.0 - m).max(0.0), 2.0 * (-m).max(0.0))
}

/// 0-1 loss of the argmax rule (lowest index on ties) at the 1-based label.
pub fn misclass_loss(f: &[f64], y: usize) -> Result<u8> {
    check_label(f.len(), y)?;
    Ok(u8::from(argmax_lowest(f) + 1 != y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn mv(u: &[f64]) -> MarginVector {
        MarginVector::new(u.to_vec()).unwrap()
    }

    fn eval(loss: LossId, u: &[f64]) -> f64 {
        loss_eval(loss, &mv(u)).unwrap()
    }

    #[test]
    fn functional_margin_examples() {
        assert_eq!(
            functional_margin(&[2.0, -1.0, -1.0], 1).unwrap().as_slice(),
            &[3.0, 3.0]
        );
        assert_eq!(
            functional_margin(&[0.0, 0.0, 0.0], 2).unwrap().as_slice(),
            &[0.0, 0.0]
        );
        assert_eq!(
            functional_margin(&[0.5, -0.5], 2).unwrap().as_slice(),
            &[-1.0]
        );
        // ordering skips the label slot
        assert_eq!(
            functional_margin(&[1.0, 5.0, 2.0, -8.0], 2)
                .unwrap()
                .as_slice(),
            &[4.0, 3.0, 13.0]
        );
    }

    #[test]
    fn functional_margin_rejects_bad_labels() {
        assert!(functional_margin(&[1.0, 2.0], 0).is_err());
        assert!(functional_margin(&[1.0, 2.0], 3).is_err());
        assert!(functional_margin(&[1.0], 1).is_err());
    }

    #[test]
    fn loss_examples() {
        assert_abs_diff_eq!(
            eval(LossId::Logit, &[0.0, 0.0]),
            3.0_f64.ln(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(eval(LossId::Svm2, &[1.0, 1.0]), 4.0 / 3.0, epsilon = 1e-15);
        assert_eq!(eval(LossId::Psi, &[-0.5, 2.0]), 2.0);
        assert_eq!(eval(LossId::Svm3, &[0.5, 3.0]), 0.5);
        assert_eq!(eval(LossId::SquaredMin, &[2.0, 3.0]), 1.0);
        assert_eq!(eval(LossId::ZeroOne, &[0.0, 1.0]), 0.0);
        assert_eq!(eval(LossId::ZeroOne, &[-1e-300, 1.0]), 1.0);
        assert_eq!(eval(LossId::BinaryPsi, &[0.0]), 1.0);
        assert_eq!(eval(LossId::BinaryPsi, &[0.25]), 0.75);
        assert_eq!(eval(LossId::BinaryExp, &[0.0]), 1.0);
    }

    #[test]
    fn logit_is_stable_for_large_margins() {
        let v = eval(LossId::Logit, &[-800.0, 3.0]);
        assert_abs_diff_eq!(v, 800.0, epsilon = 1e-9);
        assert!(eval(LossId::Logit, &[800.0, 800.0]) >= 0.0);
        assert_abs_diff_eq!(eval(LossId::BinaryLogit, &[-800.0]), 800.0, epsilon = 1e-9);
    }

    #[test]
    fn binary_tag_needs_scalar_margin() {
        assert!(loss_eval(LossId::BinaryHinge, &mv(&[0.0, 1.0])).is_err());
        assert!(loss_subgrad_u(LossId::BinaryExp, &mv(&[0.0, 1.0])).is_err());
    }

    #[test]
    fn subgradient_examples() {
        assert_eq!(
            loss_subgrad_u(LossId::Svm1, &mv(&[0.5, 2.0])).unwrap(),
            vec![-1.0, 0.0]
        );
        assert_eq!(
            loss_subgrad_u(LossId::Logit, &mv(&[0.0])).unwrap(),
            vec![-0.5]
        );
        assert_eq!(
            loss_subgrad_u(LossId::Svm1, &mv(&[1.0, 2.0])).unwrap(),
            vec![0.0, 0.0]
        );
        assert!(matches!(
            loss_subgrad_u(LossId::ZeroOne, &mv(&[0.0])),
            Err(Error::UnsupportedLoss(LossId::ZeroOne, _))
        ));
        // lowest-index argmin carries the derivative
        assert_eq!(
            loss_subgrad_u(LossId::Svm3, &mv(&[0.2, 0.2])).unwrap(),
            vec![-1.0, 0.0]
        );
    }

    #[test]
    fn kink_subgradient_is_in_subdifferential() {
        // h(v) >= h(u) + g·(v-u) around the kink u = (1, 2)
        let u = [1.0, 2.0];
        let g = loss_subgrad_u(LossId::Svm1, &mv(&u)).unwrap();
        let mut rng = 17u64;
        for _ in 0..2000 {
            let mut v = [0.0; 2];
            for vj in &mut v {
                rng = rng
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                *vj = ((rng >> 11) as f64 / (1u64 << 53) as f64) * 6.0 - 3.0;
            }
            let lin = eval(LossId::Svm1, &u) + g[0] * (v[0] - u[0]) + g[1] * (v[1] - u[1]);
            assert!(eval(LossId::Svm1, &v) >= lin - 1e-12);
        }
    }

    #[test]
    fn dc_examples() {
        assert_eq!(dc_components(&mv(&[0.5, 3.0])), (1.0, 0.0));
        assert_eq!(dc_components(&mv(&[-1.0, 2.0])), (4.0, 2.0));
        assert_eq!(dc_components(&mv(&[1.5, 2.0])), (0.0, 0.0));
    }

    #[test]
    fn misclass_examples() {
        assert_eq!(misclass_loss(&[2.0, -1.0, -1.0], 1).unwrap(), 0);
        assert_eq!(misclass_loss(&[0.0, 0.0, 0.0], 3).unwrap(), 1);
        assert_eq!(misclass_loss(&[0.1, 0.2, -0.3], 2).unwrap(), 0);
        assert!(misclass_loss(&[0.1, 0.2], 3).is_err());
    }

    #[test]
    fn loss_names_round_trip() {
        for l in LossId::ALL {
            assert_eq!(l.name().parse::<LossId>().unwrap(), l);
        }
        assert!("bogus".parse::<LossId>().is_err());
    }

    #[test]
    fn svm2_and_l2min_are_not_monotone() {
        // raising u_2 raises the shared mean, which re-activates the first term
        assert!(eval(LossId::Svm2, &[0.0, 5.0]) > eval(LossId::Svm2, &[0.0, 0.0]));
        assert!(eval(LossId::SquaredMin, &[3.0, 3.0]) > eval(LossId::SquaredMin, &[1.0, 1.0]));
    }

    fn margins(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
        (1..=max_len).prop_flat_map(|n| prop::collection::vec(-4.0..4.0f64, n))
    }

    fn pair(max_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1..=max_len).prop_flat_map(|n| {
            (
                prop::collection::vec(-4.0..4.0f64, n),
                prop::collection::vec(-4.0..4.0f64, n),
            )
        })
    }

    const MONOTONE: [LossId; 4] = [LossId::Logit, LossId::Svm1, LossId::Svm3, LossId::Psi];
    const CONVEX: [LossId; 4] = [LossId::Logit, LossId::Svm1, LossId::Svm2, LossId::Svm3];
    const BINARY: [LossId; 4] = [
        LossId::BinaryExp,
        LossId::BinaryLogit,
        LossId::BinaryHinge,
        LossId::BinaryPsi,
    ];

    proptest! {
        #[test]
        fn translation_invariance(f in prop::collection::vec(-5.0..5.0f64, 2..6), c in -10.0..10.0f64, yi in 0usize..6) {
            let y = yi % f.len() + 1;
            // use a dyadic shift so that (f + c) - (g + c) is exact
            let c = (c * 64.0).round() / 64.0;
            let f: Vec<f64> = f.iter().map(|v| (v * 1024.0).round() / 1024.0).collect();
            let shifted: Vec<f64> = f.iter().map(|v| v + c).collect();
            prop_assert_eq!(functional_margin(&f, y).unwrap(), functional_margin(&shifted, y).unwrap());
        }

        #[test]
        fn coordinate_monotonicity(u in margins(5), j in 0usize..5, bump in 0.0..3.0f64) {
            let j = j % u.len();
            let mut v = u.clone();
            v[j] += bump;
            for loss in MONOTONE {
                prop_assert!(eval(loss, &v) <= eval(loss, &u) + 1e-12, "{loss}");
            }
            for loss in BINARY {
                let (a, b) = ([u[0]], [u[0] + bump]);
                prop_assert!(eval(loss, &b) <= eval(loss, &a) + 1e-12, "{loss}");
            }
        }

        #[test]
        fn midpoint_convexity((u, v) in pair(5)) {
            let mid: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 0.5 * (a + b)).collect();
            for loss in CONVEX {
                prop_assert!(eval(loss, &mid) <= 0.5 * (eval(loss, &u) + eval(loss, &v)) + 1e-12, "{loss}");
            }
        }

        #[test]
        fn dc_identity(u in margins(5)) {
            let (cvx, cav) = dc_components(&mv(&u));
            prop_assert!((eval(LossId::Psi, &u) - (cvx - cav)).abs() <= 1e-12);
        }

        #[test]
        fn subgradient_inequality((u, v) in pair(5)) {
            for loss in CONVEX {
                let g = loss_subgrad_u(loss, &mv(&u)).unwrap();
                let lin: f64 = eval(loss, &u) + g.iter().zip(u.iter().zip(&v)).map(|(g, (a, b))| g * (b - a)).sum::<f64>();
                prop_assert!(eval(loss, &v) >= lin - 1e-10, "{loss}");
            }
            for loss in [LossId::BinaryExp, LossId::BinaryLogit, LossId::BinaryHinge] {
                let g = loss_subgrad_u(loss, &mv(&u[..1])).unwrap();
                let lin = eval(loss, &u[..1]) + g[0] * (v[0] - u[0]);
                prop_assert!(eval(loss, &v[..1]) >= lin - 1e-10, "{loss}");
            }
        }

        #[test]
        fn binary_reduction(f in -4.0..4.0f64, yi in 1usize..=2) {
            let dec = [f, -f];
            let u = functional_margin(&dec, yi).unwrap();
            let s = if yi == 1 { 1.0 } else { -1.0 };
            let m2 = [2.0 * s * f];
            prop_assert_eq!(u.as_slice(), &m2[..]);
            prop_assert_eq!(eval(LossId::Svm1, u.as_slice()), eval(LossId::BinaryHinge, &m2));
            prop_assert_eq!(eval(LossId::Svm3, u.as_slice()), eval(LossId::BinaryHinge, &m2));
            // the multi-class ψ carries a factor 2 over the two-class ramp
            prop_assert_eq!(eval(LossId::Psi, u.as_slice()), 2.0 * eval(LossId::BinaryPsi, &m2));
        }

        #[test]
        fn chain_rule_matches_finite_differences(f in prop::collection::vec(-3.0..3.0f64, 3..5), yi in 0usize..5) {
            let y = yi % f.len();
            let loss = LossId::Logit;
            let mut u = vec![0.0; f.len() - 1];
            let mut g = vec![0.0; f.len() - 1];
            let mut df = vec![0.0; f.len()];
            margins_into(&f, y, &mut u);
            subgrad(loss, &u, &mut g);
            margin_grad_to_f(loss, &g, y, &mut df);
            for c in 0..f.len() {
                let h = 1e-6;
                let (mut fp, mut fm) = (f.clone(), f.clone());
                fp[c] += h;
                fm[c] -= h;
                let (mut up, mut um) = (u.clone(), u.clone());
                margins_into(&fp, y, &mut up);
                margins_into(&fm, y, &mut um);
                let fd = (value(loss, &up) - value(loss, &um)) / (2.0 * h);
                prop_assert!((fd - df[c]).abs() < 1e-6);
            }
        }
    }
}
