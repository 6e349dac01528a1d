use multimargin::model::{gram, kernel_eval, KernelId};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn random_points(rng: &mut ChaCha20Rng) -> Vec<Vec<f64>> {
    let n = rng.gen_range(2..=60);
    let mut pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>()]).collect();
    // ties and the interval ends stress the min(s, t) structure
    if n > 4 {
        pts[1] = pts[0].clone();
        pts[2] = vec![0.0];
        pts[3] = vec![1.0];
    }
    pts
}

#[test]
fn spline_grams_are_positive_semidefinite() {
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    for kernel in [KernelId::SplineW1, KernelId::SplineW2] {
        for set in 0..50 {
            let pts = random_points(&mut rng);
            let g = gram(kernel, &pts).unwrap();
            let n = g.n();
            let m = DMatrix::from_row_slice(n, n, g.as_slice());
            assert_eq!(m, m.transpose());
            let eig = SymmetricEigen::new(m).eigenvalues;
            let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(
                lo >= -1e-10 * hi.max(1.0),
                "{kernel:?} set {set}: smallest eigenvalue {lo}"
            );
        }
    }
}

#[test]
fn gram_entries_are_kernel_values() {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let pts = random_points(&mut rng);
    for kernel in [KernelId::SplineW1, KernelId::SplineW2] {
        let g = gram(kernel, &pts).unwrap();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                assert_eq!(g.get(i, j), kernel_eval(kernel, &pts[i], &pts[j]).unwrap());
            }
        }
    }
}
