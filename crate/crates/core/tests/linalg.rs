mod common;

use common::{na_singular_values, noise, to_na};
use nalgebra::SymmetricEigen;
use proptest::prelude::*;
use spiked_unfold::linalg::{
    dot, full_singular_values, gram, second_singular_value, shifted_gram_solve, spectral_summary,
    symmetric_eigenvalues, top_singular_triple, DenseMatrix, LinearOperator, MatrixFreeOperator,
    PowerOptions,
};
use spiked_unfold::rng;
use spiked_unfold::Error;

#[test]
fn power_iteration_matches_dense_value_on_gaussian_50x200() {
    let m = noise(50, 200, 5);
    let t = top_singular_triple(&m, &PowerOptions::with_seed(1)).unwrap();
    let dense = full_singular_values(&m).unwrap()[0];
    assert!((t.value - dense).abs() < 1e-8, "{} vs {dense}", t.value);
    assert!((spiked_unfold::linalg::norm(&t.left) - 1.0).abs() < 1e-12);
    assert!((spiked_unfold::linalg::norm(&t.right) - 1.0).abs() < 1e-12);
}

#[test]
fn power_iteration_vs_dense_oracle_on_twenty_instances() {
    for seed in 0..20u64 {
        let n = 10 + (seed as usize * 7) % 50;
        let m = noise(n, 3 * n, 100 + seed);
        let t = top_singular_triple(&m, &PowerOptions::with_seed(seed)).unwrap();
        let oracle = na_singular_values(&m)[0];
        assert!(
            (t.value - oracle).abs() <= 1e-8,
            "seed {seed}: {} vs {oracle}",
            t.value
        );
    }
}

#[test]
fn matrix_free_operator_wraps_closures() {
    let m = noise(6, 9, 3);
    let mt = m.clone();
    let op = MatrixFreeOperator::new(
        6,
        9,
        move |x: &[f64], out: &mut [f64]| m.matvec(x, out),
        move |y: &[f64], out: &mut [f64]| mt.tmatvec(y, out),
    );
    let direct = top_singular_triple(&noise(6, 9, 3), &PowerOptions::default()).unwrap();
    let wrapped = top_singular_triple(&op, &PowerOptions::default()).unwrap();
    assert_eq!(direct.value, wrapped.value);
}

#[test]
fn adjoint_consistency_on_random_probes() {
    let m = noise(20, 50, 8);
    let mut r = rng::stream(9);
    for _ in 0..100 {
        let x = rng::gaussian_vec(&mut r, 50, 1.0);
        let y = rng::gaussian_vec(&mut r, 20, 1.0);
        let mut mx = vec![0.0; 20];
        let mut mty = vec![0.0; 50];
        m.apply(&x, &mut mx);
        m.apply_transpose(&y, &mut mty);
        let scale = spiked_unfold::linalg::norm(&x) * spiked_unfold::linalg::norm(&y);
        assert!((dot(&y, &mx) - dot(&mty, &x)).abs() <= 1e-10 * scale);
    }
}

#[test]
fn full_spectrum_matches_nalgebra_and_transpose() {
    let m = noise(30, 70, 2);
    let ours = full_singular_values(&m).unwrap();
    let oracle = na_singular_values(&m);
    for (a, b) in ours.iter().zip(&oracle) {
        assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
    }
    assert!(ours.windows(2).all(|w| w[0] >= w[1]));
    // The caller transposes tall inputs; both paths see the same spectrum.
    let tall = m.transpose();
    assert!(full_singular_values(&tall).is_err());
    let summary = spectral_summary(&tall, &PowerOptions::default(), true, true).unwrap();
    let full = summary.full_spectrum.unwrap();
    for (a, b) in full.iter().zip(&ours) {
        assert!((a - b).abs() <= 1e-10);
    }
    assert!((summary.top.value - full[0]).abs() < 1e-8);
    assert!((summary.second_value.unwrap() - full[1]).abs() < 1e-6);
}

#[test]
fn largest_singular_value_sits_at_the_edge() {
    // 200 x 800 with variance 1/200: phi = 2, edge 3.
    let s = full_singular_values(&noise(200, 800, 21)).unwrap();
    assert!((s[0] - 3.0).abs() < 0.05, "{}", s[0]);
}

#[test]
fn non_finite_input_is_rejected() {
    let mut data = vec![0.0; 6];
    data[4] = f64::NAN;
    assert!(matches!(
        DenseMatrix::new(2, 3, data),
        Err(Error::NonFinite(4))
    ));
}

#[test]
fn gram_matches_row_dot_products() {
    let m = noise(20, 50, 4);
    let g = gram(&m);
    for i in 0..20 {
        for j in 0..20 {
            let direct: f64 = m.row(i).iter().zip(m.row(j)).map(|(a, b)| a * b).sum();
            assert!((g.get(i, j) - direct).abs() <= 1e-14);
            assert_eq!(g.get(i, j), g.get(j, i));
        }
    }
}

#[test]
fn shifted_solve_residual() {
    let m = noise(30, 120, 6);
    let s1 = full_singular_values(&m).unwrap()[0];
    let x = s1 * 1.05;
    let b: Vec<f64> = (0..30).map(|i| (i as f64).sin() + 0.5).collect();
    let w = shifted_gram_solve(&m, x, &b).unwrap();
    // (x - M M^T / x) w, applied through M.
    let mut mtw = vec![0.0; 120];
    m.tmatvec(&w, &mut mtw);
    let mut mmtw = vec![0.0; 30];
    m.matvec(&mtw, &mut mmtw);
    let resid: f64 = (0..30)
        .map(|i| (x * w[i] - mmtw[i] / x - b[i]).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!(resid / spiked_unfold::linalg::norm(&b) <= 1e-10);
    assert!(matches!(
        shifted_gram_solve(&m, s1 * 0.99, &b),
        Err(Error::ShiftInsideSpectrum { .. })
    ));
}

#[test]
fn second_value_of_diagonal() {
    let m = DenseMatrix::from_rows(&[
        vec![5.0, 0.0, 0.0, 0.0],
        vec![0.0, 2.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
    ])
    .unwrap();
    let top = top_singular_triple(&m, &PowerOptions::default()).unwrap();
    let s2 = second_singular_value(&m, &top, &PowerOptions::default()).unwrap();
    assert!((s2 - 2.0).abs() < 1e-8);
}

#[test]
fn symmetric_eigenvalues_match_nalgebra() {
    for seed in 0..5u64 {
        let n = 5 + 13 * seed as usize;
        let a = noise(n, n, seed);
        let mut sym = a.clone();
        for i in 0..n {
            for j in 0..n {
                sym.set(i, j, a.get(i, j) + a.get(j, i));
            }
        }
        let ours = symmetric_eigenvalues(&sym).unwrap();
        let mut oracle: Vec<f64> = SymmetricEigen::new(to_na(&sym))
            .eigenvalues
            .iter()
            .copied()
            .collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        for (x, y) in ours.iter().zip(&oracle) {
            assert!(
                (x - y).abs() <= 1e-10 * oracle[0].abs().max(1.0),
                "{x} vs {y}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn power_iteration_agrees_with_svd(
        rows in 1usize..8,
        extra in 0usize..8,
        seed in any::<u64>(),
    ) {
        let m = noise(rows, rows + extra, seed);
        let oracle = na_singular_values(&m)[0];
        let t = match top_singular_triple(&m, &PowerOptions::with_seed(seed)) {
            Ok(t) => t,
            // A near-degenerate top pair may exhaust the iteration budget;
            // the carried estimate must still be close.
            Err(Error::NonConvergence { value, .. }) => {
                prop_assert!((value - oracle).abs() <= 1e-6 * oracle.max(1.0));
                return Ok(());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!((t.value - oracle).abs() <= 1e-7 * oracle.max(1.0));
        let mut mu = vec![0.0; rows];
        m.matvec(&t.right, &mut mu);
        let resid: f64 = mu.iter().zip(&t.left).map(|(a, b)| (a - t.value * b).powi(2)).sum::<f64>().sqrt();
        prop_assert!((resid - t.residual).abs() < 1e-12);
    }

    #[test]
    fn singular_values_are_nonnegative_and_sorted(
        rows in 1usize..10,
        extra in 0usize..10,
        seed in any::<u64>(),
    ) {
        let m = noise(rows, rows + extra, seed);
        let s = full_singular_values(&m).unwrap();
        prop_assert_eq!(s.len(), rows);
        prop_assert!(s.iter().all(|&x| x >= 0.0));
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
        let frob: f64 = m.as_slice().iter().map(|x| x * x).sum();
        let sum_sq: f64 = s.iter().map(|x| x * x).sum();
        prop_assert!((frob - sum_sq).abs() <= 1e-10 * frob.max(1.0));
    }
}
