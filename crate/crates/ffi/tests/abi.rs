use std::ffi::{c_char, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use multimargin_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe {
        let n = mm_last_error(ptr::null_mut(), 0);
        let mut buf = vec![0u8; n];
        mm_last_error(buf.as_mut_ptr().cast::<c_char>(), n);
        String::from_utf8(buf[..n - 1].to_vec()).unwrap()
    }
}

#[test]
fn loss_and_root() {
    let mut v = 0.0;
    unsafe {
        let u = [1.0, 1.0];
        assert_eq!(
            mm_loss_eval(cstr("svm2").as_ptr(), u.as_ptr(), 2, &mut v),
            MmStatus::Ok
        );
        assert!((v - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            mm_loss_eval(cstr("bogus").as_ptr(), u.as_ptr(), 2, &mut v),
            MmStatus::Domain
        );
        assert!(last_error().contains("bogus"));
        assert_eq!(
            mm_loss_eval(ptr::null(), u.as_ptr(), 2, &mut v),
            MmStatus::NullPointer
        );
        assert_eq!(mm_quartic_root(0.7, &mut v), MmStatus::Ok);
        assert!((v + 0.651_632).abs() < 1e-5);
        assert!(last_error().is_empty());
        assert_eq!(mm_quartic_root(0.1, &mut v), MmStatus::Domain);
    }
}

#[test]
fn generate_fit_evaluate() {
    unsafe {
        let spec = cstr("ex51(theta1=0.75;theta2=0.125;gamma=0)");
        let mut gen = ptr::null_mut();
        assert_eq!(mm_generator_new(spec.as_ptr(), 11, &mut gen), MmStatus::Ok);
        let mut data = ptr::null_mut();
        assert_eq!(mm_generator_sample(gen, 300, &mut data), MmStatus::Ok);
        assert_eq!(mm_dataset_len(data), 300);
        assert_eq!(mm_dataset_dim(data), 1);
        assert_eq!(mm_dataset_classes(data), 2);
        let (mut x, mut y) = (0.0, 0u32);
        assert_eq!(mm_dataset_get(data, 0, &mut x, &mut y), MmStatus::Ok);
        assert!((-1.0..=1.0).contains(&x) && (y == 1 || y == 2));
        assert_eq!(mm_dataset_get(data, 300, &mut x, &mut y), MmStatus::Domain);

        let cfg = cstr("loss = hinge\npenalty = sql2\nlambda = 0.01\nuse_intercept = true\n");
        let mut model = ptr::null_mut();
        assert_eq!(mm_fit(cfg.as_ptr(), data, &mut model), MmStatus::Ok);
        assert_eq!(mm_model_classes(model), 2);
        assert_eq!(mm_model_dim(model), 1);

        let mut f = [0.0; 2];
        assert_eq!(
            mm_model_eval(model, [0.5].as_ptr(), 1, f.as_mut_ptr(), 2),
            MmStatus::Ok
        );
        assert!((f[0] + f[1]).abs() < 1e-12);
        let mut c = 0u32;
        assert_eq!(
            mm_model_classify(model, [0.5].as_ptr(), 1, &mut c),
            MmStatus::Ok
        );
        assert_eq!(c, 1);
        assert_eq!(
            mm_model_eval(model, [0.5].as_ptr(), 1, f.as_mut_ptr(), 3),
            MmStatus::Domain
        );

        let (mut ge, mut se) = (0.0, 1.0);
        assert_eq!(
            mm_generalization_error(spec.as_ptr(), model, &mut ge, &mut se),
            MmStatus::Ok
        );
        assert!(ge >= 0.1875 - 1e-12 && ge < 0.3, "ge = {ge}");
        assert_eq!(se, 0.0);

        // serialize → parse gives a model with the same exact GE
        let mut need = 0usize;
        assert_eq!(
            mm_model_serialize(model, ptr::null_mut(), 0, &mut need),
            MmStatus::BufferTooSmall
        );
        let mut buf = vec![0u8; need];
        assert_eq!(
            mm_model_serialize(model, buf.as_mut_ptr().cast(), need, &mut need),
            MmStatus::Ok
        );
        let mut back = ptr::null_mut();
        assert_eq!(mm_model_parse(buf.as_ptr().cast(), &mut back), MmStatus::Ok);
        let mut ge2 = 0.0;
        assert_eq!(
            mm_generalization_error(spec.as_ptr(), back, &mut ge2, ptr::null_mut()),
            MmStatus::Ok
        );
        assert_eq!(ge, ge2);

        mm_model_free(back);
        mm_model_free(model);
        mm_dataset_free(data);
        mm_generator_free(gen);
        // freeing null is a no-op
        mm_model_free(ptr::null_mut());
        mm_dataset_free(ptr::null_mut());
        mm_generator_free(ptr::null_mut());
    }
}

#[test]
fn dataset_from_arrays_and_errors() {
    unsafe {
        let x = [0.1, 0.5, 0.9];
        let y = [1u32, 2, 3];
        let mut data = ptr::null_mut();
        assert_eq!(
            mm_dataset_new(3, 1, 3, x.as_ptr(), y.as_ptr(), &mut data),
            MmStatus::Ok
        );
        assert_eq!(mm_dataset_len(data), 3);
        let bad = [1u32, 2, 4];
        let mut other = ptr::null_mut();
        assert_eq!(
            mm_dataset_new(3, 1, 3, x.as_ptr(), bad.as_ptr(), &mut other),
            MmStatus::Domain
        );
        assert!(other.is_null());

        // a binary loss on three classes is rejected with its own code
        let cfg = cstr("loss = hinge\npenalty = sql2\nlambda = 0.1\n");
        let mut model = ptr::null_mut();
        assert_eq!(
            mm_fit(cfg.as_ptr(), data, &mut model),
            MmStatus::UnsupportedLoss
        );
        let cfg = cstr("loss = svm1\npenalty = sql2\n");
        assert_eq!(mm_fit(cfg.as_ptr(), data, &mut model), MmStatus::Parse);
        assert_eq!(
            mm_fit(cfg.as_ptr(), ptr::null(), &mut model),
            MmStatus::Parse
        );
        let cfg = cstr("loss = svm1\npenalty = sql2\nlambda = 0.1\n");
        assert_eq!(
            mm_fit(cfg.as_ptr(), ptr::null(), &mut model),
            MmStatus::NullPointer
        );
        assert_eq!(
            mm_model_parse(cstr("form=bogus").as_ptr(), &mut model),
            MmStatus::Parse
        );
        let mut gen = ptr::null_mut();
        assert_eq!(
            mm_generator_new(cstr("ex9(m=1)").as_ptr(), 0, &mut gen),
            MmStatus::Domain
        );
        mm_dataset_free(data);
    }
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("multimargin.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "mm_last_error",
        "mm_loss_eval",
        "mm_quartic_root",
        "mm_generator_new",
        "mm_generator_sample",
        "mm_dataset_new",
        "mm_fit",
        "mm_model_eval",
        "mm_model_classify",
        "mm_generalization_error",
        "mm_model_free",
        "typedef struct MmModel MmModel",
        "MM_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    // syntax-check with the system C compiler when one is installed
    if let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-std=c99", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .output()
    {
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
