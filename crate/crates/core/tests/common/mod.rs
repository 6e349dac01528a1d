//! Helpers shared by the integration suites and the acceptance report.
#![allow(dead_code)]

use multimargin::datagen::{make_generator, Dataset, GeneratorHandle};
use multimargin::margin::LossId;
use multimargin::model::{Decision, LinearDecision};
use multimargin::oracle::{misclass_risk_linear_1d, v_risk_quadrature, ExampleSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub const BINARY_LOSSES: [LossId; 4] = [
    LossId::BinaryExp,
    LossId::BinaryLogit,
    LossId::BinaryHinge,
    LossId::BinaryPsi,
];

/// A random linear rule `sign(a·x + b)` in a random one-dimensional world.
#[derive(Debug, Clone, Copy)]
pub struct Ex51Case {
    pub a: f64,
    pub b: f64,
    pub spec: ExampleSpec,
}

pub fn random_ex51_cases(count: usize, seed: u64) -> Vec<Ex51Case> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let a = sign * rng.gen_range(0.2..3.0);
            let b = rng.gen_range(-1.5..1.5);
            let spec = ExampleSpec::ex51(
                rng.gen_range(0.55..1.0),
                rng.gen_range(0.0..0.45),
                rng.gen_range(0.0..3.0),
            );
            Ex51Case {
                a,
                b,
                spec: spec.unwrap(),
            }
        })
        .collect()
}

/// The binary losses written out directly on `m = y·f`, independent of the
/// library's loss code.
fn binary_loss(loss: LossId, m: f64) -> f64 {
    match loss {
        LossId::BinaryExp => (-m).exp(),
        LossId::BinaryLogit => (-m).exp().ln_1p(),
        LossId::BinaryHinge => (1.0 - m).max(0.0),
        LossId::BinaryPsi => {
            if m <= 0.0 {
                1.0
            } else if m <= 1.0 {
                1.0 - m
            } else {
                0.0
            }
        }
        _ => unreachable!("not a binary loss"),
    }
}

/// One oracle-vs-simulation comparison.
#[derive(Debug, Clone)]
pub struct Agreement {
    pub what: String,
    pub exact: f64,
    pub mc: f64,
    pub stderr: f64,
}

impl Agreement {
    pub fn z(&self) -> f64 {
        if self.stderr == 0.0 {
            if self.mc == self.exact {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mc - self.exact) / self.stderr
        }
    }
}

/// Compares the closed-form GE and the quadrature V-risk of the four binary
/// losses against plain Monte Carlo over `draws` generator samples.
pub fn ex51_agreement(case: &Ex51Case, draws: usize, seed: u64) -> Vec<Agreement> {
    let mut gen: GeneratorHandle = make_generator(case.spec, seed).unwrap();
    let data = multimargin::datagen::sample(&mut gen, draws).unwrap();
    let n = draws as f64;
    // sums and sums of squares: GE then the four losses
    let mut s = [0.0; 5];
    let mut s2 = [0.0; 5];
    for (x, y) in data.iter() {
        let t = case.a * x[0] + case.b;
        let sign = if y == 1 { 1.0 } else { -1.0 };
        let predicted = if t >= 0.0 { 1 } else { 2 };
        let mut vals = [f64::from(u8::from(predicted != y)); 5];
        for (v, loss) in vals[1..].iter_mut().zip(BINARY_LOSSES) {
            *v = binary_loss(loss, sign * t);
        }
        for i in 0..5 {
            s[i] += vals[i];
            s2[i] += vals[i] * vals[i];
        }
    }
    let mc = |i: usize| {
        let m = s[i] / n;
        (m, ((s2[i] / n - m * m).max(0.0) / n).sqrt())
    };
    let dec = Decision::Linear(LinearDecision::binary_1d(case.a, case.b));
    let mut out = Vec::with_capacity(5);
    let (m, se) = mc(0);
    out.push(Agreement {
        what: "ge".into(),
        exact: misclass_risk_linear_1d(case.a, case.b, &case.spec).unwrap(),
        mc: m,
        stderr: se,
    });
    for (i, loss) in BINARY_LOSSES.into_iter().enumerate() {
        let (m, se) = mc(i + 1);
        out.push(Agreement {
            what: loss.name().into(),
            exact: v_risk_quadrature(&case.spec, loss, &dec).unwrap().value,
            mc: m,
            stderr: se,
        });
    }
    out
}

/// Whether each step of an objective trace is nonincreasing within
/// `rel_tol`, relative to the previous value.
pub fn trace_nonincreasing(trace: &[f64], rel_tol: f64) -> bool {
    trace
        .windows(2)
        .all(|w| w[1] <= w[0] + rel_tol * (1.0 + w[0].abs()))
}

/// Asymptotic critical value of `√n · D` at level `alpha`.
pub fn ks_critical(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

pub fn ks_statistic(mut values: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Largest |z| over classes of `Σ (1[y = c] - p_c(x))`, which has mean zero
/// and variance `Σ p_c(x)(1 - p_c(x))` when labels follow the model.
pub fn label_z(spec: &ExampleSpec, data: &Dataset) -> f64 {
    let k = spec.class_count();
    let mut resid = vec![0.0; k];
    let mut var = vec![0.0; k];
    for (x, y) in data.iter() {
        let p = spec.class_probs(x).unwrap();
        for c in 0..k {
            resid[c] += f64::from(u8::from(y == c + 1)) - p[c];
            var[c] += p[c] * (1.0 - p[c]);
        }
    }
    resid
        .iter()
        .zip(&var)
        .map(|(r, v)| (r / v.sqrt()).abs())
        .fold(0.0, f64::max)
}
