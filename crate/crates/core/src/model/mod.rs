//! Decision-function vectors under the zero-sum constraint.
//!
//! Both decision forms store only the first `k - 1` class components; the
//! last is derived as minus their sum, so `Σ_j f_j(x) = 0` holds by
//! construction.

mod format;
mod kernel;
mod penalty;

pub use format::{parse_model, serialize_model};
pub(crate) use kernel::GramOp;
pub use kernel::{gram, kernel_eval, KernelId, SymMatrix};
pub use penalty::{penalty_eval, Penalty};

use crate::error::{domain, Result};
use crate::margin::argmax_lowest;

/// Anything that maps an input to a `k`-vector of decision values.
pub trait DecisionFn: Sync {
    fn class_count(&self) -> usize;
    fn input_dim(&self) -> usize;
    /// Writes `f(x)` into `out` (length `k`); `x` is assumed valid.
    fn eval_into(&self, x: &[f64], out: &mut [f64]);
}

/// Linear decision `f_j(x) = <w_j, x> + b_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDecision {
    k: usize,
    d: usize,
    /// `(k-1) × d`, row-major.
    w: Vec<f64>,
    /// `k - 1` intercepts.
    b: Vec<f64>,
}

impl LinearDecision {
    pub fn zeros(k: usize, d: usize) -> Result<Self> {
        if k < 2 || d == 0 {
            return domain(format!(
                "linear decision needs k >= 2 and d >= 1 (got k={k}, d={d})"
            ));
        }
        Ok(Self {
            k,
            d,
            w: vec![0.0; (k - 1) * d],
            b: vec![0.0; k - 1],
        })
    }

    /// Builds from the free rows: `w` is `(k-1) × d` row-major, `b` has
    /// `k - 1` entries.
    pub fn from_free(k: usize, d: usize, w: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let mut dec = Self::zeros(k, d)?;
        if w.len() != (k - 1) * d || b.len() != k - 1 {
            return domain("free parameter arrays have the wrong length");
        }
        if w.iter().chain(&b).any(|v| !v.is_finite()) {
            return domain("decision parameters must be finite");
        }
        dec.w = w;
        dec.b = b;
        Ok(dec)
    }

    /// Builds from a full `k × d` slope matrix and `k` intercepts whose class
    /// sums must vanish.
    pub fn from_full(w: &[Vec<f64>], b: &[f64]) -> Result<Self> {
        let k = w.len();
        let d = w.first().map_or(0, Vec::len);
        if b.len() != k || w.iter().any(|r| r.len() != d) {
            return domain("slope rows and intercepts disagree in shape");
        }
        let tol = |vals: &mut dyn Iterator<Item = f64>| -> (f64, f64) {
            vals.fold((0.0, 0.0), |(s, a), v| (s + v, a + v.abs()))
        };
        for j in 0..d {
            let (s, a) = tol(&mut w.iter().map(|r| r[j]));
            if s.abs() > 1e-10 * (1.0 + a) {
                return domain(format!("slope column {j} sums to {s}, not zero"));
            }
        }
        let (s, a) = tol(&mut b.iter().copied());
        if s.abs() > 1e-10 * (1.0 + a) {
            return domain(format!("intercepts sum to {s}, not zero"));
        }
        let free_w = w[..k - 1].iter().flatten().copied().collect();
        Self::from_free(k, d, free_w, b[..k - 1].to_vec())
    }

    /// Two-class decision `(a·x + b, -(a·x + b))` on scalar inputs.
    pub fn binary_1d(a: f64, b: f64) -> Self {
        Self {
            k: 2,
            d: 1,
            w: vec![a],
            b: vec![b],
        }
    }

    pub fn free_slopes(&self) -> &[f64] {
        &self.w
    }

    pub fn free_intercepts(&self) -> &[f64] {
        &self.b
    }

    /// Slope row of class `c` (0-based), including the derived last row.
    pub fn slope_row(&self, c: usize) -> Vec<f64> {
        if c + 1 < self.k {
            self.w[c * self.d..(c + 1) * self.d].to_vec()
        } else {
            (0..self.d)
                .map(|j| -(0..self.k - 1).map(|r| self.w[r * self.d + j]).sum::<f64>())
                .collect()
        }
    }

    /// Full `k × d` slope matrix.
    pub fn slopes(&self) -> Vec<Vec<f64>> {
        (0..self.k).map(|c| self.slope_row(c)).collect()
    }

    /// All `k` intercepts.
    pub fn intercepts(&self) -> Vec<f64> {
        let mut b = self.b.clone();
        b.push(-self.b.iter().sum::<f64>());
        b
    }

    pub fn has_intercept(&self) -> bool {
        self.b.iter().any(|&v| v != 0.0)
    }

    /// Scales every parameter by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            k: self.k,
            d: self.d,
            w: self.w.iter().map(|v| v * c).collect(),
            b: self.b.iter().map(|v| v * c).collect(),
        }
    }
}

impl DecisionFn for LinearDecision {
    fn class_count(&self) -> usize {
        self.k
    }

    fn input_dim(&self) -> usize {
        self.d
    }

    #[inline]
    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        let mut total = 0.0;
        for c in 0..self.k - 1 {
            let row = &self.w[c * self.d..(c + 1) * self.d];
            let v = row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.b[c];
            out[c] = v;
            total += v;
        }
        out[self.k - 1] = -total;
    }
}

/// Kernel expansion `f_c(x) = Σ_i α_ic K(x_i, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDecision {
    k: usize,
    kernel: KernelId,
    anchors: Vec<Vec<f64>>,
    /// `n × (k-1)`, row-major.
    alpha: Vec<f64>,
}

impl KernelDecision {
    pub fn zeros(k: usize, kernel: KernelId, anchors: Vec<Vec<f64>>) -> Result<Self> {
        if k < 2 {
            return domain(format!("kernel decision needs k >= 2 (got {k})"));
        }
        if anchors.is_empty() {
            return domain("kernel decision needs at least one anchor");
        }
        let dim = anchors[0].len();
        for a in &anchors {
            kernel.check_point(a)?;
            if a.len() != dim {
                return domain("anchors differ in dimension");
            }
        }
        let n = anchors.len();
        Ok(Self {
            k,
            kernel,
            anchors,
            alpha: vec![0.0; n * (k - 1)],
        })
    }

    /// `alpha` holds the free `n × (k-1)` coefficients, row-major.
    pub fn from_free(
        k: usize,
        kernel: KernelId,
        anchors: Vec<Vec<f64>>,
        alpha: Vec<f64>,
    ) -> Result<Self> {
        let mut dec = Self::zeros(k, kernel, anchors)?;
        if alpha.len() != dec.alpha.len() {
            return domain("coefficient array has the wrong length");
        }
        if alpha.iter().any(|v| !v.is_finite()) {
            return domain("kernel coefficients must be finite");
        }
        dec.alpha = alpha;
        Ok(dec)
    }

    /// Builds from full `n × k` coefficient rows, each summing to zero.
    pub fn from_full(kernel: KernelId, anchors: Vec<Vec<f64>>, alpha: &[Vec<f64>]) -> Result<Self> {
        let k = alpha.first().map_or(0, Vec::len);
        if alpha.len() != anchors.len() || alpha.iter().any(|r| r.len() != k) {
            return domain("coefficient rows disagree with the anchors");
        }
        for (i, r) in alpha.iter().enumerate() {
            let s: f64 = r.iter().sum();
            let a: f64 = r.iter().map(|v| v.abs()).sum();
            if s.abs() > 1e-10 * (1.0 + a) {
                return domain(format!("coefficient row {i} sums to {s}, not zero"));
            }
        }
        if k < 2 {
            return domain("kernel decision needs k >= 2");
        }
        let free = alpha
            .iter()
            .flat_map(|r| r[..k - 1].iter().copied())
            .collect();
        Self::from_free(k, kernel, anchors, free)
    }

    pub fn kernel(&self) -> KernelId {
        self.kernel
    }

    pub fn anchors(&self) -> &[Vec<f64>] {
        &self.anchors
    }

    pub fn free_alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Full `n × k` coefficient rows.
    pub fn alpha_rows(&self) -> Vec<Vec<f64>> {
        let km = self.k - 1;
        self.alpha
            .chunks(km)
            .map(|r| {
                let mut row = r.to_vec();
                row.push(-r.iter().sum::<f64>());
                row
            })
            .collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.alpha.iter_mut().for_each(|v| *v *= c);
        out
    }
}

impl DecisionFn for KernelDecision {
    fn class_count(&self) -> usize {
        self.k
    }

    fn input_dim(&self) -> usize {
        self.anchors[0].len()
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        let km = self.k - 1;
        out.iter_mut().for_each(|v| *v = 0.0);
        for (a, coef) in self.anchors.iter().zip(self.alpha.chunks(km)) {
            let kv = self.kernel.eval_unchecked(a, x);
            for c in 0..km {
                out[c] += coef[c] * kv;
            }
        }
        out[km] = -out[..km].iter().sum::<f64>();
    }
}

/// Either decision form.
#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    Linear(LinearDecision),
    Kernel(KernelDecision),
}

impl Decision {
    pub fn as_linear(&self) -> Option<&LinearDecision> {
        match self {
            Decision::Linear(l) => Some(l),
            Decision::Kernel(_) => None,
        }
    }

    pub fn as_kernel(&self) -> Option<&KernelDecision> {
        match self {
            Decision::Kernel(kd) => Some(kd),
            Decision::Linear(_) => None,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        match self {
            Decision::Linear(l) => Decision::Linear(l.scaled(c)),
            Decision::Kernel(kd) => Decision::Kernel(kd.scaled(c)),
        }
    }
}

impl DecisionFn for Decision {
    fn class_count(&self) -> usize {
        match self {
            Decision::Linear(l) => l.class_count(),
            Decision::Kernel(kd) => kd.class_count(),
        }
    }

    fn input_dim(&self) -> usize {
        match self {
            Decision::Linear(l) => l.input_dim(),
            Decision::Kernel(kd) => kd.input_dim(),
        }
    }

    #[inline]
    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Decision::Linear(l) => l.eval_into(x, out),
            Decision::Kernel(kd) => kd.eval_into(x, out),
        }
    }
}

impl From<LinearDecision> for Decision {
    fn from(l: LinearDecision) -> Self {
        Decision::Linear(l)
    }
}

impl From<KernelDecision> for Decision {
    fn from(kd: KernelDecision) -> Self {
        Decision::Kernel(kd)
    }
}

fn check_input(decision: &dyn DecisionFn, x: &[f64]) -> Result<()> {
    if x.len() != decision.input_dim() {
        return domain(format!(
            "input has dimension {}, decision expects {}",
            x.len(),
            decision.input_dim()
        ));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return domain("input must be finite");
    }
    Ok(())
}

/// `(f_1(x), …, f_k(x))`.
pub fn eval_decision(decision: &dyn DecisionFn, x: &[f64]) -> Result<Vec<f64>> {
    check_input(decision, x)?;
    let mut out = vec![0.0; decision.class_count()];
    decision.eval_into(x, &mut out);
    Ok(out)
}

/// 1-based argmax class, lowest index on ties.
pub fn classify(decision: &dyn DecisionFn, x: &[f64]) -> Result<usize> {
    Ok(argmax_lowest(&eval_decision(decision, x)?) + 1)
}
