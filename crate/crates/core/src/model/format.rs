//! Flat `key=value` model documents.
//!
//! ```text
//! form=linear
//! classes=3
//! dim=2
//! slopes=<k*d values, row-major>
//! intercepts=<k values>
//! ```
//!
//! ```text
//! form=kernel
//! classes=3
//! kernel=splinew1
//! anchors=<n>
//! dim=1
//! points=<n*dim values, row-major>
//! alpha=<n*k values, row-major>
//! ```
//!
//! Full class rows are written; the derived last class is recomputed on
//! parse after a zero-sum check, so serialize → parse → serialize is
//! byte-identical. Lines starting with `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Decision, KernelDecision, KernelId, LinearDecision};
use crate::error::{Error, Result};

fn join(vals: impl IntoIterator<Item = f64>) -> String {
    let mut s = String::new();
    for (i, v) in vals.into_iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        // `{}` is the shortest representation that parses back exactly
        write!(s, "{v}").unwrap();
    }
    s
}

pub fn serialize_model(decision: &Decision) -> String {
    let mut out = String::new();
    match decision {
        Decision::Linear(l) => {
            writeln!(out, "form=linear").unwrap();
            writeln!(out, "classes={}", l.k).unwrap();
            writeln!(out, "dim={}", l.d).unwrap();
            writeln!(out, "slopes={}", join(l.slopes().into_iter().flatten())).unwrap();
            writeln!(out, "intercepts={}", join(l.intercepts())).unwrap();
        }
        Decision::Kernel(kd) => {
            writeln!(out, "form=kernel").unwrap();
            writeln!(out, "classes={}", kd.k).unwrap();
            writeln!(out, "kernel={}", kd.kernel).unwrap();
            writeln!(out, "anchors={}", kd.anchors.len()).unwrap();
            writeln!(out, "dim={}", kd.anchors[0].len()).unwrap();
            writeln!(out, "points={}", join(kd.anchors.iter().flatten().copied())).unwrap();
            writeln!(out, "alpha={}", join(kd.alpha_rows().into_iter().flatten())).unwrap();
        }
    }
    out
}

struct Fields {
    map: HashMap<String, (usize, String)>,
}

impl Fields {
    fn parse(text: &str) -> Result<Self> {
        let mut map = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, val) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key=value, got `{line}`"),
            })?;
            let key = key.trim().to_string();
            if map
                .insert(key.clone(), (i + 1, val.trim().to_string()))
                .is_some()
            {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { map })
    }

    fn take(&mut self, key: &str) -> Result<(usize, String)> {
        self.map.remove(key).ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("missing key `{key}`"),
        })
    }

    fn count(&mut self, key: &str) -> Result<usize> {
        let (line, v) = self.take(key)?;
        v.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("`{key}` must be a count, got `{v}`"),
        })
    }

    fn floats(&mut self, key: &str, expect: usize) -> Result<Vec<f64>> {
        let (line, v) = self.take(key)?;
        let vals = v
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                line,
                msg: format!("`{key}`: {e}"),
            })?;
        if vals.len() != expect {
            return Err(Error::Parse {
                line,
                msg: format!("`{key}` needs {expect} values, got {}", vals.len()),
            });
        }
        Ok(vals)
    }

    fn finish(self) -> Result<()> {
        match self.map.into_iter().min_by_key(|(_, (l, _))| *l) {
            Some((k, (line, _))) => Err(Error::Parse {
                line,
                msg: format!("unknown key `{k}`"),
            }),
            None => Ok(()),
        }
    }
}

fn rows(vals: Vec<f64>, width: usize) -> Vec<Vec<f64>> {
    vals.chunks(width).map(<[f64]>::to_vec).collect()
}

fn as_parse(err: Error) -> Error {
    match err {
        Error::Domain(msg) => Error::Parse { line: 0, msg },
        other => other,
    }
}

pub fn parse_model(text: &str) -> Result<Decision> {
    let mut f = Fields::parse(text)?;
    let (line, form) = f.take("form")?;
    let dec = match form.as_str() {
        "linear" => {
            let k = f.count("classes")?;
            let d = f.count("dim")?;
            let w = f.floats("slopes", k * d)?;
            let b = f.floats("intercepts", k)?;
            Decision::Linear(LinearDecision::from_full(&rows(w, d.max(1)), &b).map_err(as_parse)?)
        }
        "kernel" => {
            let k = f.count("classes")?;
            let (kl, kname) = f.take("kernel")?;
            let kernel: KernelId = kname.parse().map_err(|_| Error::Parse {
                line: kl,
                msg: format!("unknown kernel `{kname}`"),
            })?;
            let n = f.count("anchors")?;
            let d = f.count("dim")?;
            let pts = f.floats("points", n * d)?;
            let alpha = f.floats("alpha", n * k)?;
            Decision::Kernel(
                KernelDecision::from_full(kernel, rows(pts, d.max(1)), &rows(alpha, k.max(1)))
                    .map_err(as_parse)?,
            )
        }
        other => {
            return Err(Error::Parse {
                line,
                msg: format!("unknown form `{other}`"),
            })
        }
    };
    f.finish()?;
    Ok(dec)
}
