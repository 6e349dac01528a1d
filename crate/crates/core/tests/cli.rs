use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multimargin"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    let start = text
        .find(&format!("{key}="))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        + key.len()
        + 1;
    text[start..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.csv"), path(dir.path(), "b.csv"));
    let args = [
        "gen",
        "--example",
        "ex52",
        "--gamma",
        "2",
        "--n",
        "50",
        "--seed",
        "4",
    ];
    stdout(&run(&[&args[..], &["--out", &a]].concat()));
    stdout(&run(&[&args[..], &["--out", &b]].concat()));
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert!(text.starts_with("# seed=4 generator=chacha20 spec=ex52(theta=0.7;gamma=2)"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 51);
}

#[test]
fn fit_then_eval_reports_the_same_error() {
    let dir = tempfile::tempdir().unwrap();
    let (data, model) = (path(dir.path(), "train.csv"), path(dir.path(), "model.txt"));
    stdout(&run(&[
        "gen",
        "--example",
        "ex53",
        "--n",
        "60",
        "--seed",
        "2",
        "--out",
        &data,
    ]));
    let fitted = stdout(&run(&[
        "fit",
        "--example",
        "ex53",
        "--loss",
        "svm1",
        "--lambda",
        "0.01",
        "--data",
        &data,
        "--out",
        &model,
    ]));
    let first = std::fs::read(&model).unwrap();
    let evaluated = stdout(&run(&["eval", "--model", &model]));
    assert_eq!(field(&fitted, "ge"), field(&evaluated, "ge"));
    // refitting reproduces the model file exactly
    stdout(&run(&[
        "fit",
        "--example",
        "ex53",
        "--loss",
        "svm1",
        "--lambda",
        "0.01",
        "--data",
        &data,
        "--out",
        &model,
    ]));
    assert_eq!(first, std::fs::read(&model).unwrap());
}

#[test]
fn fig1_prints_the_default_grid() {
    let text = stdout(&run(&["fig1"]));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "theta2,e_v1,e_v2,e_v3,e_v4");
    assert_eq!(rows.len(), 10);
    assert!(rows[1].starts_with("0.125,"));
    assert!(rows[9].starts_with("0.375,"));
}

#[test]
fn root_verb_prints_the_planar_root() {
    let text = stdout(&run(&["root", "--theta", "0.7"]));
    assert!((field(&text, "root") + 0.651_632).abs() < 1e-5, "{text}");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(
        run(&["fit", "--loss", "bogus", "--lambda", "0.1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "fit",
            "--example",
            "ex53",
            "--loss",
            "hinge",
            "--lambda",
            "0.1"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_ne!(
        run(&["eval", "--model", "/nonexistent/model.txt"])
            .status
            .code(),
        Some(0)
    );
}
