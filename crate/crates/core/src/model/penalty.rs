use std::fmt;
use std::str::FromStr;

use super::{Decision, KernelDecision, LinearDecision};
use crate::error::{domain, Error, Result};

/// Penalty `J(f)` on the decision parameters. Intercepts are never penalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    /// Sum of squares of every slope entry, derived class row included.
    SqL2,
    /// Sum of absolute slope entries, derived class row included.
    L1,
    /// `θ‖w‖_1 + (1-θ)‖w‖_2^2` over the free slope rows (the single free
    /// slope vector for two classes).
    ElasticNet(f64),
    /// `Σ_c α_c^T G α_c` over all `k` classes.
    RkhsSeminorm,
}

impl Penalty {
    pub fn elastic_net(theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return domain(format!("elastic-net weight {theta} outside [0, 1]"));
        }
        Ok(Penalty::ElasticNet(theta))
    }

    pub fn is_kernel(self) -> bool {
        matches!(self, Penalty::RkhsSeminorm)
    }
}

impl fmt::Display for Penalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Penalty::SqL2 => f.write_str("sql2"),
            Penalty::L1 => f.write_str("l1"),
            Penalty::ElasticNet(t) => write!(f, "enet:{t}"),
            Penalty::RkhsSeminorm => f.write_str("rkhs"),
        }
    }
}

impl FromStr for Penalty {
    type Err = Error;

    /// `sql2`, `l1`, `rkhs` or `enet:<theta>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sql2" => Ok(Penalty::SqL2),
            "l1" => Ok(Penalty::L1),
            "rkhs" => Ok(Penalty::RkhsSeminorm),
            _ => match s.strip_prefix("enet:") {
                Some(t) => {
                    let theta = t
                        .parse::<f64>()
                        .map_err(|_| Error::Domain(format!("bad elastic-net weight `{t}`")))?;
                    Penalty::elastic_net(theta)
                }
                None => domain(format!("unknown penalty `{s}`")),
            },
        }
    }
}

fn linear_penalty(penalty: Penalty, dec: &LinearDecision) -> f64 {
    let free = dec.free_slopes();
    let d = dec.d;
    let derived = (0..d).map(|j| -(0..dec.k - 1).map(|r| free[r * d + j]).sum::<f64>());
    match penalty {
        Penalty::SqL2 => {
            free.iter().map(|v| v * v).sum::<f64>() + derived.map(|v| v * v).sum::<f64>()
        }
        Penalty::L1 => {
            free.iter().map(|v| v.abs()).sum::<f64>() + derived.map(f64::abs).sum::<f64>()
        }
        Penalty::ElasticNet(theta) => {
            let l1: f64 = free.iter().map(|v| v.abs()).sum();
            let l2: f64 = free.iter().map(|v| v * v).sum();
            theta * l1 + (1.0 - theta) * l2
        }
        Penalty::RkhsSeminorm => unreachable!("checked by caller"),
    }
}

/// `Σ_c α_c^T G α_c`, with `G` the anchor Gram matrix.
pub(crate) fn rkhs_penalty(dec: &KernelDecision) -> f64 {
    let rows = dec.alpha_rows();
    let n = rows.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let kv = dec.kernel.eval_unchecked(&dec.anchors[i], &dec.anchors[j]);
            let dot: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            total += kv * dot;
        }
    }
    total
}

pub fn penalty_eval(penalty: Penalty, decision: &Decision) -> Result<f64> {
    match (penalty, decision) {
        (Penalty::RkhsSeminorm, Decision::Kernel(kd)) => Ok(rkhs_penalty(kd)),
        (Penalty::RkhsSeminorm, Decision::Linear(_)) => {
            domain("the RKHS seminorm needs a kernel decision")
        }
        (_, Decision::Linear(l)) => Ok(linear_penalty(penalty, l)),
        (_, Decision::Kernel(_)) => domain(format!("penalty `{penalty}` needs a linear decision")),
    }
}
