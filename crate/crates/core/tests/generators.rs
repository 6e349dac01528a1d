//! Frequency tests of the four sample generators: marginal laws by
//! Kolmogorov–Smirnov, labels against the conditional class probabilities.

mod common;

use common::{ks_critical, ks_statistic, label_z};
use multimargin::datagen::{make_generator, sample, Dataset};
use multimargin::oracle::ExampleSpec;

const N: usize = 100_000;
const ALPHA: f64 = 1e-3;

fn draw(spec: ExampleSpec, seed: u64, n: usize) -> Dataset {
    sample(&mut make_generator(spec, seed).unwrap(), n).unwrap()
}

#[test]
fn ex51_magnitude_sign_and_labels() {
    for gamma in [0.0, 1.0, 2.0] {
        let spec = ExampleSpec::ex51(0.75, 0.125, gamma).unwrap();
        let data = draw(spec, 3, N);
        let xs: Vec<f64> = data.iter().map(|(x, _)| x[0]).collect();
        let d = ks_statistic(xs.iter().map(|x| x.abs()).collect(), |t| {
            t.powf(gamma + 1.0)
        });
        assert!(
            d * (N as f64).sqrt() < ks_critical(ALPHA),
            "gamma={gamma}: KS {d}"
        );
        let pos = xs.iter().filter(|&&x| x > 0.0).count() as f64;
        let z = (pos - 0.5 * N as f64) / (0.25 * N as f64).sqrt();
        assert!(z.abs() < 4.0, "gamma={gamma}: sign z {z}");
        assert!(label_z(&spec, &data) < 4.0);
    }
}

#[test]
fn ex52_min_coordinate_law_and_labels() {
    for gamma in [0.0, 2.0] {
        let spec = ExampleSpec::ex52(0.7, gamma).unwrap();
        let data = draw(spec, 5, N);
        // density of m = min(|x1|, |x2|) is ∝ (1 - m) m^γ on [0, 1]
        let g = gamma;
        let cdf = |t: f64| {
            (g + 1.0) * (g + 2.0) * (t.powf(g + 1.0) / (g + 1.0) - t.powf(g + 2.0) / (g + 2.0))
        };
        let m: Vec<f64> = data
            .iter()
            .map(|(x, _)| x[0].abs().min(x[1].abs()))
            .collect();
        let d = ks_statistic(m, cdf);
        assert!(
            d * (N as f64).sqrt() < ks_critical(ALPHA),
            "gamma={gamma}: KS {d}"
        );
        // the four quadrants are equally likely
        let mut quad = [0usize; 4];
        for (x, _) in data.iter() {
            quad[usize::from(x[0] < 0.0) * 2 + usize::from(x[1] < 0.0)] += 1;
        }
        for q in quad {
            let z = (q as f64 - 0.25 * N as f64) / (0.1875 * N as f64).sqrt();
            assert!(z.abs() < 4.0, "quadrant counts {quad:?}");
        }
        assert!(label_z(&spec, &data) < 4.0);
    }
}

#[test]
fn ex53_uniform_input_and_labels() {
    let spec = ExampleSpec::ex53(1).unwrap();
    let data = draw(spec, 7, N);
    let d = ks_statistic(data.iter().map(|(x, _)| x[0]).collect(), |t| t);
    assert!(d * (N as f64).sqrt() < ks_critical(ALPHA), "KS {d}");
    assert!(label_z(&spec, &data) < 4.0);
}

#[test]
fn ex54_uniform_cube_and_labels() {
    let p = 20;
    let spec = ExampleSpec::ex54(0.8, p).unwrap();
    let n = 20_000;
    let data = draw(spec, 9, n);
    for j in 0..p {
        let d = ks_statistic(data.iter().map(|(x, _)| x[j]).collect(), |t| {
            0.5 * (t + 1.0)
        });
        assert!(
            d * (n as f64).sqrt() < ks_critical(ALPHA / p as f64),
            "coordinate {j}: KS {d}"
        );
    }
    assert!(label_z(&spec, &data) < 4.0);
}

#[test]
fn every_world_is_reproducible_by_seed() {
    let specs = [
        ExampleSpec::ex51(0.75, 0.125, 1.0).unwrap(),
        ExampleSpec::ex52(0.7, 2.0).unwrap(),
        ExampleSpec::ex53(2).unwrap(),
        ExampleSpec::ex54(0.8, 30).unwrap(),
    ];
    for spec in specs {
        let a = draw(spec, 42, 500);
        assert_eq!(a, draw(spec, 42, 500), "{spec}");
        assert_ne!(a, draw(spec, 43, 500), "{spec}");
        // a longer stream starts with the shorter one
        let long = draw(spec, 42, 700);
        assert_eq!(&long.inputs()[..a.inputs().len()], a.inputs());
        assert_eq!(&long.labels()[..500], a.labels());
    }
}
