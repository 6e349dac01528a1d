use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};

/// One of the four synthetic classification worlds.
///
/// * `Ex51` — binary, `X` on `[-1, 1]` with density `(γ+1)|x|^γ / 2`;
///   class 1 with probability `theta1` for `x > 0` and `theta2` otherwise.
/// * `Ex52` — four classes, `X` on `[-1, 1]²` with density proportional to
///   `min(|x1|, |x2|)^γ`; the quadrant's class with probability `theta`.
/// * `Ex53` — three classes, `X` uniform on `[0, 1]` with piecewise constant
///   class probabilities; `m` is the smoothness order of the spline kernel.
/// * `Ex54` — binary, `X` uniform on `[-1, 1]^p`; only `x1` is informative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExampleSpec {
    Ex51 {
        theta1: f64,
        theta2: f64,
        gamma: f64,
    },
    Ex52 {
        theta: f64,
        gamma: f64,
    },
    Ex53 {
        m: u32,
    },
    Ex54 {
        tau: f64,
        p: usize,
    },
}

impl ExampleSpec {
    pub fn ex51(theta1: f64, theta2: f64, gamma: f64) -> Result<Self> {
        Self::Ex51 {
            theta1,
            theta2,
            gamma,
        }
        .validated()
    }

    pub fn ex52(theta: f64, gamma: f64) -> Result<Self> {
        Self::Ex52 { theta, gamma }.validated()
    }

    pub fn ex53(m: u32) -> Result<Self> {
        Self::Ex53 { m }.validated()
    }

    pub fn ex54(tau: f64, p: usize) -> Result<Self> {
        Self::Ex54 { tau, p }.validated()
    }

    /// Checks the parameter ranges, returning the value unchanged.
    pub fn validated(self) -> Result<Self> {
        let finite = |v: f64, name: &str| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                domain(format!("{name} must be finite"))
            }
        };
        match self {
            Self::Ex51 {
                theta1,
                theta2,
                gamma,
            } => {
                finite(theta1, "theta1")?;
                finite(theta2, "theta2")?;
                finite(gamma, "gamma")?;
                if !(theta1 > 0.5 && theta1 <= 1.0) {
                    return domain(format!("theta1 must lie in (1/2, 1], got {theta1}"));
                }
                if !(theta2 >= 0.0 && theta2 < 0.5) {
                    return domain(format!("theta2 must lie in [0, 1/2), got {theta2}"));
                }
                if gamma < 0.0 {
                    return domain(format!("gamma must be nonnegative, got {gamma}"));
                }
            }
            Self::Ex52 { theta, gamma } => {
                finite(theta, "theta")?;
                finite(gamma, "gamma")?;
                if !(theta > 0.25 && theta < 1.0) {
                    return domain(format!("theta must lie in (1/4, 1), got {theta}"));
                }
                if gamma < 0.0 {
                    return domain(format!("gamma must be nonnegative, got {gamma}"));
                }
            }
            Self::Ex53 { m } => {
                if m == 0 {
                    return domain("smoothness order m must be at least 1");
                }
            }
            Self::Ex54 { tau, p } => {
                finite(tau, "tau")?;
                if !(tau > 0.5 && tau <= 1.0) {
                    return domain(format!("tau must lie in (1/2, 1], got {tau}"));
                }
                if p == 0 {
                    return domain("dimension p must be at least 1");
                }
            }
        }
        Ok(self)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ex51 { .. } => "ex51",
            Self::Ex52 { .. } => "ex52",
            Self::Ex53 { .. } => "ex53",
            Self::Ex54 { .. } => "ex54",
        }
    }

    pub fn class_count(&self) -> usize {
        match self {
            Self::Ex51 { .. } | Self::Ex54 { .. } => 2,
            Self::Ex52 { .. } => 4,
            Self::Ex53 { .. } => 3,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Self::Ex51 { .. } | Self::Ex53 { .. } => 1,
            Self::Ex52 { .. } => 2,
            Self::Ex54 { p, .. } => *p,
        }
    }

    /// Rejects inputs of the wrong dimension or outside the support.
    pub fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return domain(format!(
                "{} expects inputs of dimension {}, got {}",
                self.name(),
                self.input_dim(),
                x.len()
            ));
        }
        let (lo, hi) = match self {
            Self::Ex53 { .. } => (0.0, 1.0),
            _ => (-1.0, 1.0),
        };
        if x.iter().any(|v| !(v >= &lo && v <= &hi)) {
            return domain(format!(
                "input {x:?} lies outside the support of {}",
                self.name()
            ));
        }
        Ok(())
    }

    /// Conditional class probabilities `P(Y = c | X = x)`, `c = 1..k`,
    /// written into `out`; `x` is assumed valid.
    pub(crate) fn class_probs_into(&self, x: &[f64], out: &mut [f64]) {
        match *self {
            Self::Ex51 { theta1, theta2, .. } => {
                let p1 = if x[0] > 0.0 { theta1 } else { theta2 };
                out[0] = p1;
                out[1] = 1.0 - p1;
            }
            Self::Ex52 { theta, .. } => {
                let r = ex52_region(x);
                out.iter_mut().for_each(|v| *v = (1.0 - theta) / 3.0);
                out[r] = theta;
            }
            Self::Ex53 { .. } => out.copy_from_slice(&ex53_probs(x[0])),
            Self::Ex54 { tau, .. } => {
                let p1 = if x[0] > 0.0 { tau } else { 1.0 - tau };
                out[0] = p1;
                out[1] = 1.0 - p1;
            }
        }
    }

    /// Conditional class probabilities at a supported input.
    pub fn class_probs(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut out = vec![0.0; self.class_count()];
        self.class_probs_into(x, &mut out);
        Ok(out)
    }
}

impl fmt::Display for ExampleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ex51 {
                theta1,
                theta2,
                gamma,
            } => {
                write!(f, "ex51(theta1={theta1};theta2={theta2};gamma={gamma})")
            }
            Self::Ex52 { theta, gamma } => write!(f, "ex52(theta={theta};gamma={gamma})"),
            Self::Ex53 { m } => write!(f, "ex53(m={m})"),
            Self::Ex54 { tau, p } => write!(f, "ex54(tau={tau};p={p})"),
        }
    }
}

impl FromStr for ExampleSpec {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form, e.g. `ex52(theta=0.7;gamma=0)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Domain(format!("malformed world `{s}`, expected e.g. ex53(m=1)"));
        let (name, rest) = s.split_once('(').ok_or_else(bad)?;
        let body = rest.strip_suffix(')').ok_or_else(bad)?;
        let mut fields = HashMap::new();
        for part in body.split(';').filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            if fields.insert(k.trim(), v.trim()).is_some() {
                return domain(format!("duplicate field `{k}` in `{s}`"));
            }
        }
        let mut take = |key: &str| -> Result<&str> {
            fields
                .remove(key)
                .ok_or_else(|| Error::Domain(format!("`{s}` lacks field `{key}`")))
        };
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::Domain(format!("bad number `{v}` in `{s}`")))
        };
        let int = |v: &str| {
            v.parse::<u64>()
                .map_err(|_| Error::Domain(format!("bad integer `{v}` in `{s}`")))
        };
        let spec = match name {
            "ex51" => Self::ex51(
                num(take("theta1")?)?,
                num(take("theta2")?)?,
                num(take("gamma")?)?,
            )?,
            "ex52" => Self::ex52(num(take("theta")?)?, num(take("gamma")?)?)?,
            "ex53" => Self::ex53(u32::try_from(int(take("m")?)?).map_err(|_| bad())?)?,
            "ex54" => Self::ex54(num(take("tau")?)?, int(take("p")?)? as usize)?,
            _ => return domain(format!("unknown world `{name}`")),
        };
        if let Some(extra) = fields.keys().next() {
            return domain(format!("unexpected field `{extra}` in `{s}`"));
        }
        Ok(spec)
    }
}

/// 0-based quadrant class: `{x1 ≥ 0, x2 ≥ 0}`, `{x1 ≥ 0, x2 < 0}`,
/// `{x1 < 0, x2 ≥ 0}`, `{x1 < 0, x2 < 0}`.
#[inline]
pub(crate) fn ex52_region(x: &[f64]) -> usize {
    match (x[0] >= 0.0, x[1] >= 0.0) {
        (true, true) => 0,
        (true, false) => 1,
        (false, true) => 2,
        (false, false) => 3,
    }
}

#[inline]
pub(crate) fn ex53_probs(x: f64) -> [f64; 3] {
    let (a, b) = (5.0 / 11.0, 3.0 / 11.0);
    if x <= 1.0 / 3.0 {
        [a, b, b]
    } else if x <= 2.0 / 3.0 {
        [b, a, b]
    } else {
        [b, b, a]
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn display_parses_back() {
        for spec in [
            ExampleSpec::ex51(0.75, 0.125, 0.5).unwrap(),
            ExampleSpec::ex52(0.7, 2.0).unwrap(),
            ExampleSpec::ex53(2).unwrap(),
            ExampleSpec::ex54(0.8, 200).unwrap(),
        ] {
            assert_eq!(spec.to_string().parse::<ExampleSpec>().unwrap(), spec);
        }
        for bad in [
            "ex51(theta1=0.75)",
            "ex52(theta=0.7;gamma=0;x=1)",
            "ex9(m=1)",
            "ex53 m=1",
            "ex53(m=0)",
        ] {
            assert!(bad.parse::<ExampleSpec>().is_err(), "{bad}");
        }
    }

    use super::*;

    #[test]
    fn validation() {
        assert!(ExampleSpec::ex51(0.75, 0.125, 0.0).is_ok());
        assert!(ExampleSpec::ex51(0.5, 0.125, 0.0).is_err());
        assert!(ExampleSpec::ex51(0.75, 0.5, 0.0).is_err());
        assert!(ExampleSpec::ex51(0.75, 0.1, -1.0).is_err());
        assert!(ExampleSpec::ex52(0.25, 0.0).is_err());
        assert!(ExampleSpec::ex52(1.0, 0.0).is_err());
        assert!(ExampleSpec::ex52(0.7, 2.0).is_ok());
        assert!(ExampleSpec::ex53(0).is_err());
        assert!(ExampleSpec::ex54(0.5, 3).is_err());
        assert!(ExampleSpec::ex54(0.8, 0).is_err());
        assert!(ExampleSpec::ex54(0.8, 200).is_ok());
    }

    #[test]
    fn support_and_probs() {
        let s = ExampleSpec::ex53(1).unwrap();
        assert!(s.check_input(&[-0.1]).is_err());
        assert!(s.check_input(&[0.0, 0.0]).is_err());
        let p = s.class_probs(&[0.5]).unwrap();
        assert_eq!(p, vec![3.0 / 11.0, 5.0 / 11.0, 3.0 / 11.0]);
        let s = ExampleSpec::ex52(0.7, 0.0).unwrap();
        let p = s.class_probs(&[0.3, -0.2]).unwrap();
        assert_eq!(p[1], 0.7);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
