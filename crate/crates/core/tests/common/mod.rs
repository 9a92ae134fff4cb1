#![allow(dead_code)]

use arbk::linsys::LinearSystem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Gaussian `A` and `b = A x_true` for a sparse `x_true`.
pub fn consistent_system(m: usize, n: usize, seed: u64) -> (LinearSystem, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    let x_true: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.4) {
                rng.sample::<f64, _>(StandardNormal) * 3.0
            } else {
                0.0
            }
        })
        .collect();
    let b: Vec<f64> = a
        .chunks_exact(n)
        .map(|r| r.iter().zip(&x_true).map(|(u, v)| u * v).sum())
        .collect();
    (LinearSystem::from_row_major(m, n, a, b).unwrap(), x_true)
}

/// Minimum-norm solution `A⁺b = Aᵀ (AAᵀ)⁺ b`, from an SVD solve of the dual
/// normal equations.
pub fn min_norm_solution(sys: &LinearSystem) -> Vec<f64> {
    let a = nalgebra::DMatrix::from_row_slice(sys.rows(), sys.cols(), sys.row_major());
    let gram = &a * a.transpose();
    let rhs = nalgebra::DVector::from_column_slice(sys.rhs());
    let y = gram
        .svd(true, true)
        .solve(&rhs, 1e-10 * sys.frob_sq())
        .expect("svd solve");
    (a.transpose() * y).as_slice().to_vec()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
