mod common;

use proptest::prelude::*;
use psrfr_core::metrics::trace_correlation;
use psrfr_core::nalgebra::{DMatrix, DVector};
use psrfr_core::numerics::{
    center_and_covariance, gram_schmidt, solve_spd, sym_eig_desc, DataMatrix,
};
use rand::Rng;

fn gaussian(seed: u64, n: usize, p: usize) -> DMatrix<f64> {
    common::to_dmatrix(&common::gaussian_rows(&mut common::rng(seed), n, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigen_reconstruction(seed in any::<u64>(), p in 1usize..=20) {
        let g = gaussian(seed, p, p);
        let a = &g + g.transpose();
        let eig = sym_eig_desc(&a).unwrap();
        let v = &eig.eigenvectors;
        let rebuilt = v * DMatrix::from_diagonal(&eig.eigenvalues) * v.transpose();
        prop_assert!(common::max_abs_diff(&rebuilt, &a) <= 1e-8 * a.amax().max(1.0));
        prop_assert!(common::max_abs_diff(&(v.transpose() * v), &DMatrix::identity(p, p)) <= 1e-10);
        prop_assert!(eig.eigenvalues.as_slice().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn spd_solve_recovers_solution(seed in any::<u64>(), p in 1usize..=15, log_cond in 0.0f64..6.0) {
        let mut rng = common::rng(seed);
        let q = common::random_orthogonal(&mut rng, p);
        let spectrum = DVector::from_fn(p, |i, _| {
            if p == 1 { 1.0 } else { 10f64.powf(-log_cond * i as f64 / (p - 1) as f64) }
        });
        let a = &q * DMatrix::from_diagonal(&spectrum) * q.transpose();
        let a = (&a + a.transpose()) * 0.5;
        let x0 = DMatrix::from_fn(p, 2, |_, _| rng.random_range(-3.0..3.0));
        let x = solve_spd(&a, &(&a * &x0)).unwrap();
        prop_assert!((&x - &x0).norm() <= 1e-6 * x0.norm());
    }

    #[test]
    fn gram_schmidt_orthonormal_same_span(seed in any::<u64>(), p in 2usize..=12, k in 1usize..=4) {
        let k = k.min(p);
        let a = gaussian(seed, p, k);
        let g = gram_schmidt(&a).unwrap();
        prop_assert!(common::max_abs_diff(&(g.transpose() * &g), &DMatrix::identity(k, k)) <= 1e-10);
        prop_assert!(common::max_abs_diff(&(&g * g.transpose()), &common::span_projection(&a)) <= 1e-8);
    }

    #[test]
    fn covariance_exact_under_row_permutation(seed in any::<u64>(), n in 2usize..=60, p in 1usize..=6) {
        let mut rng = common::rng(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| rng.random_range(-1e3..1e3)).collect())
            .collect();
        let mut shuffled = rows.clone();
        for i in (1..n).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        let a = center_and_covariance(&DataMatrix::from_rows(&rows).unwrap()).unwrap();
        let b = center_and_covariance(&DataMatrix::from_rows(&shuffled).unwrap()).unwrap();
        prop_assert_eq!(a.covariance, b.covariance);
        prop_assert_eq!(a.mean, b.mean);
    }

    #[test]
    fn trace_correlation_depends_only_on_spans(seed in any::<u64>(), p in 3usize..=10, k in 1usize..=3) {
        let mut rng = common::rng(seed);
        let k = k.min(p - 1);
        let t = gram_schmidt(&gaussian(seed ^ 1, p, k)).unwrap();
        let e = gram_schmidt(&gaussian(seed ^ 2, p, k)).unwrap();
        let r = trace_correlation(&t, &e).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&r));

        let o = common::random_orthogonal(&mut rng, k);
        prop_assert!((trace_correlation(&(&t * &o), &e).unwrap() - r).abs() <= 1e-10);
        prop_assert!((trace_correlation(&t, &(&e * &o)).unwrap() - r).abs() <= 1e-10);
        prop_assert!((trace_correlation(&e, &t).unwrap() - r).abs() <= 1e-10);

        let a = common::random_orthogonal(&mut rng, p);
        prop_assert!((trace_correlation(&(&a * &t), &(&a * &e)).unwrap() - r).abs() <= 1e-10);

        prop_assert!((trace_correlation(&t, &t).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn single_direction_trace_correlation_is_squared_cosine(seed in any::<u64>(), p in 2usize..=10) {
        let t = gaussian(seed, p, 1);
        let e = gaussian(seed.wrapping_add(1), p, 1);
        let cos = t.dot(&e) / (t.norm() * e.norm());
        let tn = &t / t.norm();
        prop_assert!((trace_correlation(&tn, &e).unwrap() - cos * cos).abs() <= 1e-12);
    }
}
