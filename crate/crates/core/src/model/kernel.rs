//! Reproducing kernels and Gram matrices.
//!
//! The spline kernels reproduce the Sobolev space `W_m[0, 1]` under the norm
//! `Σ_{ν<m} f^(ν)(0)^2 + ∫ (f^(m))^2`, i.e.
//!
//! ```text
//! K(s, t) = Σ_{ν<m} s^ν t^ν / (ν!)^2 + ∫_0^1 (s-u)_+^{m-1} (t-u)_+^{m-1} / ((m-1)!)^2 du
//! ```
//!
//! evaluated in closed form for `m = 1, 2`.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelId {
    /// Euclidean inner product.
    Linear,
    /// `1 + min(s, t)` on `[0, 1]`.
    SplineW1,
    /// `1 + st + st·m - (s + t) m^2 / 2 + m^3 / 3`, `m = min(s, t)`, on `[0, 1]`.
    SplineW2,
}

impl KernelId {
    pub fn name(self) -> &'static str {
        match self {
            KernelId::Linear => "linear",
            KernelId::SplineW1 => "splinew1",
            KernelId::SplineW2 => "splinew2",
        }
    }

    /// Spline kernel of Sobolev order `m`.
    pub fn spline(m: u32) -> Result<Self> {
        match m {
            1 => Ok(KernelId::SplineW1),
            2 => Ok(KernelId::SplineW2),
            _ => domain(format!(
                "spline kernels are available for m = 1, 2 (got {m})"
            )),
        }
    }

    pub fn is_spline(self) -> bool {
        !matches!(self, KernelId::Linear)
    }

    /// Checks that `x` lies in the kernel's domain.
    pub fn check_point(self, x: &[f64]) -> Result<()> {
        if x.iter().any(|v| !v.is_finite()) {
            return domain("kernel inputs must be finite");
        }
        if self.is_spline() {
            if x.len() != 1 {
                return domain(format!(
                    "{} takes scalar inputs, got dimension {}",
                    self,
                    x.len()
                ));
            }
            if !(0.0..=1.0).contains(&x[0]) {
                return domain(format!("{} input {} outside [0, 1]", self, x[0]));
            }
        }
        Ok(())
    }

    /// Kernel value without domain checks.
    #[inline]
    pub(crate) fn eval_unchecked(self, s: &[f64], t: &[f64]) -> f64 {
        match self {
            KernelId::Linear => s.iter().zip(t).map(|(a, b)| a * b).sum(),
            KernelId::SplineW1 => 1.0 + s[0].min(t[0]),
            KernelId::SplineW2 => {
                let (s, t) = (s[0], t[0]);
                let m = s.min(t);
                1.0 + s * t + s * t * m - 0.5 * (s + t) * m * m + m * m * m / 3.0
            }
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(KernelId::Linear),
            "splinew1" => Ok(KernelId::SplineW1),
            "splinew2" => Ok(KernelId::SplineW2),
            _ => domain(format!("unknown kernel `{s}`")),
        }
    }
}

pub fn kernel_eval(kernel: KernelId, s: &[f64], t: &[f64]) -> Result<f64> {
    kernel.check_point(s)?;
    kernel.check_point(t)?;
    if s.len() != t.len() {
        return domain(format!(
            "kernel arguments differ in dimension ({} vs {})",
            s.len(),
            t.len()
        ));
    }
    Ok(kernel.eval_unchecked(s, t))
}

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Gram matrix `[K(x_i, x_j)]` of a point set.
pub fn gram(kernel: KernelId, points: &[Vec<f64>]) -> Result<SymMatrix> {
    let dim = points.first().map_or(0, Vec::len);
    for p in points {
        kernel.check_point(p)?;
        if p.len() != dim {
            return domain("gram points differ in dimension");
        }
    }
    let n = points.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval_unchecked(&points[i], &points[j]);
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    Ok(SymMatrix { n, data })
}

/// Products `G a` with the Gram matrix of a fixed point set.
///
/// For the scalar spline kernels `K(s, t)` is a polynomial in `s`, `t` and
/// `min(s, t)`, so after sorting the points once every product reduces to
/// prefix sums and costs `O(n)` per column instead of `O(n²)`.
pub(crate) enum GramOp {
    Dense {
        n: usize,
        data: Vec<f64>,
    },
    Spline {
        kernel: KernelId,
        order: Vec<usize>,
        xs: Vec<f64>,
    },
}

impl GramOp {
    pub(crate) fn new(kernel: KernelId, points: &[Vec<f64>]) -> Result<Self> {
        if kernel.is_spline() {
            for p in points {
                kernel.check_point(p)?;
            }
            let mut order: Vec<usize> = (0..points.len()).collect();
            order.sort_by(|&i, &j| points[i][0].total_cmp(&points[j][0]));
            let xs = order.iter().map(|&i| points[i][0]).collect();
            Ok(GramOp::Spline { kernel, order, xs })
        } else {
            let g = gram(kernel, points)?;
            Ok(GramOp::Dense {
                n: g.n,
                data: g.data,
            })
        }
    }

    /// Writes `Σ_j G_ij a[j·a_stride + c]` into `out[i·out_stride + c]` for
    /// `c < cols`; other entries of `out` are left alone.
    pub(crate) fn apply(
        &self,
        a: &[f64],
        a_stride: usize,
        out: &mut [f64],
        out_stride: usize,
        cols: usize,
    ) {
        match self {
            GramOp::Dense { n, data } => {
                for i in 0..*n {
                    let row = &data[i * n..(i + 1) * n];
                    let oi = &mut out[i * out_stride..i * out_stride + cols];
                    oi.iter_mut().for_each(|v| *v = 0.0);
                    for (g, aj) in row.iter().zip(a.chunks(a_stride)) {
                        for c in 0..cols {
                            oi[c] += g * aj[c];
                        }
                    }
                }
            }
            GramOp::Spline { kernel, order, xs } => {
                for c in 0..cols {
                    let col = |q: usize| a[order[q] * a_stride + c];
                    // moments Σ x^p a over all points
                    let mut total = [0.0; 4];
                    for (q, &x) in xs.iter().enumerate() {
                        let v = col(q);
                        total[0] += v;
                        total[1] += x * v;
                        total[2] += x * x * v;
                        total[3] += x * x * x * v;
                    }
                    // moments over the points up to and including the current one
                    let mut left = [0.0; 4];
                    for (q, &x) in xs.iter().enumerate() {
                        let v = col(q);
                        left[0] += v;
                        left[1] += x * v;
                        left[2] += x * x * v;
                        left[3] += x * x * x * v;
                        let right = |p: usize| total[p] - left[p];
                        let y = match kernel {
                            KernelId::SplineW1 => total[0] + left[1] + x * right(0),
                            KernelId::SplineW2 => {
                                total[0] + x * total[1] + 0.5 * x * left[2] - left[3] / 6.0
                                    + 0.5 * x * x * right(1)
                                    - x * x * x * right(0) / 6.0
                            }
                            KernelId::Linear => {
                                unreachable!("linear kernels use the dense product")
                            }
                        };
                        out[order[q] * out_stride + c] = y;
                    }
                }
            }
        }
    }
}
