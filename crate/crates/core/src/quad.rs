//! One-dimensional quadrature: adaptive Simpson and Gauss–Legendre.

use std::f64::consts::PI;

const MAX_DEPTH: u32 = 48;
/// Relative accuracy below which refinement is pointless in `f64`.
const REL_FLOOR: f64 = 1e-15;

struct Simpson<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    rel: f64,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = ((self.f)(lm), (self.f)(rm));
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // local error budget: absolute share or relative to the piece
        let eff = tol.max(self.rel * (left.abs() + right.abs()));
        if depth == 0 || delta.abs() <= 15.0 * eff || m <= a || m >= b {
            return left + right + delta / 15.0;
        }
        self.recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + self.recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson with Richardson correction to absolute tolerance `tol`
/// (or about machine precision relative to the integral, if larger).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    adaptive_simpson_rel(f, a, b, tol, REL_FLOOR)
}

/// Adaptive Simpson stopping at absolute error `tol` or relative error
/// `rel` (for integrands of one sign), whichever is looser.
pub fn adaptive_simpson_rel<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, rel: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let s = Simpson {
        f: &f,
        rel: rel.max(REL_FLOOR),
    };
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    // a forced first split keeps symmetric integrands from fooling the test
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    s.recurse(a, m, fa, flm, fm, left, 0.5 * tol, MAX_DEPTH)
        + s.recurse(m, b, fm, frm, fb, right, 0.5 * tol, MAX_DEPTH)
}

/// Integrates over `[a, b]` split at the given interior points, which need
/// not be sorted or inside the interval. The tolerance is shared evenly.
pub fn integrate_split<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cuts: &[f64], tol: f64) -> f64 {
    integrate_split_rel(f, a, b, cuts, tol, REL_FLOOR)
}

/// [`integrate_split`] with an additional relative tolerance.
pub fn integrate_split_rel<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cuts: &[f64],
    tol: f64,
    rel: f64,
) -> f64 {
    let mut pts: Vec<f64> = cuts
        .iter()
        .copied()
        .filter(|&c| c > a && c < b && c.is_finite())
        .collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let pieces = (pts.len() - 1).max(1) as f64;
    pts.windows(2)
        .map(|w| adaptive_simpson_rel(&f, w[0], w[1], tol / pieces, rel))
        .sum()
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simpson_smooth() {
        let v = adaptive_simpson(|x: f64| x.exp(), 0.0, 1.0, 1e-12);
        assert_abs_diff_eq!(v, std::f64::consts::E - 1.0, epsilon = 1e-12);
        let v = adaptive_simpson(|x: f64| x.sin(), 0.0, PI, 1e-12);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn simpson_kinked_with_split() {
        let f = |x: f64| (x - 0.3).abs();
        let exact = 0.5 * 0.3 * 0.3 + 0.5 * 0.7 * 0.7;
        assert_abs_diff_eq!(
            integrate_split(f, 0.0, 1.0, &[0.3], 1e-12),
            exact,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(adaptive_simpson(f, 0.0, 1.0, 1e-10), exact, epsilon = 1e-9);
    }

    #[test]
    fn simpson_weak_singularity() {
        let v = adaptive_simpson(|x: f64| x.sqrt(), 0.0, 1.0, 1e-10);
        assert_abs_diff_eq!(v, 2.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for n in [1, 2, 5, 20, 200] {
            let gl = GaussLegendre::new(n);
            assert_abs_diff_eq!(gl.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-12);
            let deg = 2 * n - 1;
            let v = gl.integrate(|x| x.powi(deg as i32 - 1), 0.0, 1.0);
            assert_abs_diff_eq!(v, 1.0 / deg as f64, epsilon = 1e-12);
        }
    }
}
