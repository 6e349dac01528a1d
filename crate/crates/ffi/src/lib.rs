//! C ABI over `multimargin`.
//!
//! Objects cross the boundary as opaque handles (`MmGenerator`, `MmDataset`,
//! `MmModel`) created by `mm_*_new`/`mm_fit`/`mm_model_parse` and released
//! with the matching `mm_*_free`. Every fallible function returns an
//! [`MmStatus`]; on failure the message is kept per thread and can be read
//! with [`mm_last_error`]. Strings are NUL-terminated UTF-8.
//!
//! Worlds are named by their display form, e.g. `ex52(theta=0.7;gamma=0)`,
//! and fit settings by the `key = value` config document.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use multimargin::datagen::{make_generator, sample, Dataset, GeneratorHandle};
use multimargin::margin::{loss_eval, LossId, MarginVector};
use multimargin::model::{
    classify, eval_decision, parse_model, serialize_model, Decision, DecisionFn,
};
use multimargin::oracle::{generalization_error, quartic_root, ExampleSpec};
use multimargin::solver::{fit, FitConfig};
use multimargin::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    UnsupportedLoss = 4,
    Oracle = 5,
    Overflow = 6,
    NotAvailable = 7,
    Parse = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
    Study = 12,
}

/// Random stream bound to a world and seed.
pub struct MmGenerator(GeneratorHandle);

/// Labelled sample; labels are 1-based.
pub struct MmDataset(Dataset);

/// Fitted or parsed decision rule.
pub struct MmModel(Decision);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> MmStatus {
    match e {
        Error::Domain(_) => MmStatus::Domain,
        Error::UnsupportedLoss(..) => MmStatus::UnsupportedLoss,
        Error::Oracle(_) => MmStatus::Oracle,
        Error::Overflow(_) => MmStatus::Overflow,
        Error::NotAvailable(_) => MmStatus::NotAvailable,
        Error::Study(_) => MmStatus::Study,
        Error::Parse { .. } => MmStatus::Parse,
        Error::Io(_) => MmStatus::Io,
    }
}

/// Failure inside a call, before conversion to a status.
struct Fail(MmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(MmStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `body`, converting errors and panics into a status and the
/// thread's last-error message.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> MmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            MmStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MmStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Fail(
            MmStatus::InvalidUtf8,
            format!("`{what}` is not valid UTF-8"),
        )
    })
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn parse_spec(s: &str) -> Result<ExampleSpec, Fail> {
    Ok(s.parse::<ExampleSpec>()?)
}

/// Copies `s` plus a NUL into `buf` when it fits; `needed` receives the
/// byte count including the NUL either way.
unsafe fn write_string(
    s: &str,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> Result<(), Fail> {
    let n = s.len() + 1;
    if let Some(needed) = needed.as_mut() {
        *needed = n;
    }
    if buf.is_null() || cap < n {
        return Err(Fail(
            MmStatus::BufferTooSmall,
            format!("buffer of {cap} bytes, {n} needed"),
        ));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Copies the calling thread's last error message (empty after a success)
/// into `buf`. Returns the message length including the NUL; when it
/// exceeds `cap` nothing is written. `buf` may be null to query the length.
#[no_mangle]
pub unsafe extern "C" fn mm_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let n = e.len() + 1;
        if !buf.is_null() && cap >= n {
            ptr::copy_nonoverlapping(e.as_ptr(), buf.cast::<u8>(), e.len());
            *buf.add(e.len()) = 0;
        }
        n
    })
}

/// Margin loss `h(u)` for a loss named as in configs (`svm1`, `hinge`, …).
#[no_mangle]
pub unsafe extern "C" fn mm_loss_eval(
    loss: *const c_char,
    u: *const f64,
    len: usize,
    out: *mut f64,
) -> MmStatus {
    guard(|| {
        let loss: LossId = text(loss, "loss")?.parse()?;
        let u = MarginVector::new(slice(u, len, "u")?.to_vec())?;
        *out_ref(out, "out")? = loss_eval(loss, &u)?;
        Ok(())
    })
}

/// Largest negative root of the planar-world quartic at `theta`.
#[no_mangle]
pub unsafe extern "C" fn mm_quartic_root(theta: f64, out: *mut f64) -> MmStatus {
    guard(|| {
        *out_ref(out, "out")? = quartic_root(theta)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mm_generator_new(
    spec: *const c_char,
    seed: u64,
    out: *mut *mut MmGenerator,
) -> MmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let spec = parse_spec(text(spec, "spec")?)?;
        *out = Box::into_raw(Box::new(MmGenerator(make_generator(spec, seed)?)));
        Ok(())
    })
}

/// Draws the next `n` points of the generator's stream.
#[no_mangle]
pub unsafe extern "C" fn mm_generator_sample(
    gen: *mut MmGenerator,
    n: usize,
    out: *mut *mut MmDataset,
) -> MmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let gen = gen.as_mut().ok_or_else(|| null("gen"))?;
        *out = Box::into_raw(Box::new(MmDataset(sample(&mut gen.0, n)?)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mm_generator_free(gen: *mut MmGenerator) {
    if !gen.is_null() {
        drop(Box::from_raw(gen));
    }
}

/// Builds a dataset from `n` row-major points of dimension `d` and 1-based
/// labels in `1..=k`.
#[no_mangle]
pub unsafe extern "C" fn mm_dataset_new(
    k: usize,
    d: usize,
    n: usize,
    x: *const f64,
    y: *const u32,
    out: *mut *mut MmDataset,
) -> MmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let xs = slice(
            x,
            n.checked_mul(d)
                .ok_or_else(|| Fail(MmStatus::Domain, "n * d overflows".into()))?,
            "x",
        )?;
        let ys = slice(y, n, "y")?.iter().map(|&v| v as usize).collect();
        *out = Box::into_raw(Box::new(MmDataset(Dataset::new(k, d, xs.to_vec(), ys)?)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mm_dataset_len(data: *const MmDataset) -> usize {
    data.as_ref().map_or(0, |d| d.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn mm_dataset_dim(data: *const MmDataset) -> usize {
    data.as_ref().map_or(0, |d| d.0.dim())
}

#[no_mangle]
pub unsafe extern "C" fn mm_dataset_classes(data: *const MmDataset) -> usize {
    data.as_ref().map_or(0, |d| d.0.class_count())
}

/// Copies point `i` (`dim` values) into `x` and its label into `y`.
#[no_mangle]
pub unsafe extern "C" fn mm_dataset_get(
    data: *const MmDataset,
    i: usize,
    x: *mut f64,
    y: *mut u32,
) -> MmStatus {
    guard(|| {
        let data = &handle(data, "data")?.0;
        if i >= data.len() {
            return Err(Fail(
                MmStatus::Domain,
                format!("index {i} out of range for {} points", data.len()),
            ));
        }
        if x.is_null() {
            return Err(null("x"));
        }
        ptr::copy_nonoverlapping(data.point(i).as_ptr(), x, data.dim());
        *out_ref(y, "y")? = data.label(i) as u32;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mm_dataset_free(data: *mut MmDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Fits a model with settings given as a `key = value` config document
/// (`loss`, `penalty` and `lambda` required).
#[no_mangle]
pub unsafe extern "C" fn mm_fit(
    config: *const c_char,
    data: *const MmDataset,
    out: *mut *mut MmModel,
) -> MmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let cfg = FitConfig::parse(text(config, "config")?)?;
        let report = fit(&cfg, &handle(data, "data")?.0)?;
        *out = Box::into_raw(Box::new(MmModel(report.decision)));
        Ok(())
    })
}

/// Parses a model document as written by [`mm_model_serialize`].
#[no_mangle]
pub unsafe extern "C" fn mm_model_parse(doc: *const c_char, out: *mut *mut MmModel) -> MmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = Box::into_raw(Box::new(MmModel(parse_model(text(doc, "doc")?)?)));
        Ok(())
    })
}

/// Writes the model document into `buf`; `needed` receives its size
/// including the NUL (pass a null `buf` to query it).
#[no_mangle]
pub unsafe extern "C" fn mm_model_serialize(
    model: *const MmModel,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> MmStatus {
    guard(|| {
        write_string(
            &serialize_model(&handle(model, "model")?.0),
            buf,
            cap,
            needed,
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn mm_model_classes(model: *const MmModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.class_count())
}

#[no_mangle]
pub unsafe extern "C" fn mm_model_dim(model: *const MmModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.input_dim())
}

/// Decision vector `f(x)`; `x` has `dim` entries and `out` `k` entries.
#[no_mangle]
pub unsafe extern "C" fn mm_model_eval(
    model: *const MmModel,
    x: *const f64,
    dim: usize,
    out: *mut f64,
    k: usize,
) -> MmStatus {
    guard(|| {
        let m = &handle(model, "model")?.0;
        if k != m.class_count() {
            return Err(Fail(
                MmStatus::Domain,
                format!(
                    "output has {k} slots, model has {} classes",
                    m.class_count()
                ),
            ));
        }
        let f = eval_decision(m, slice(x, dim, "x")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(f.as_ptr(), out, k);
        Ok(())
    })
}

/// Argmax class (1-based, lowest index on ties) at `x`.
#[no_mangle]
pub unsafe extern "C" fn mm_model_classify(
    model: *const MmModel,
    x: *const f64,
    dim: usize,
    out: *mut u32,
) -> MmStatus {
    guard(|| {
        let m = &handle(model, "model")?.0;
        *out_ref(out, "out")? = classify(m, slice(x, dim, "x")?)? as u32;
        Ok(())
    })
}

/// Generalization error of the model in a world, with its standard error
/// (zero when computed exactly). `stderr_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn mm_generalization_error(
    spec: *const c_char,
    model: *const MmModel,
    value_out: *mut f64,
    stderr_out: *mut f64,
) -> MmStatus {
    guard(|| {
        let spec = parse_spec(text(spec, "spec")?)?;
        let est = generalization_error(&spec, &handle(model, "model")?.0)?;
        *out_ref(value_out, "value_out")? = est.value;
        if let Some(s) = stderr_out.as_mut() {
            *s = est.stderr;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mm_model_free(model: *mut MmModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}
