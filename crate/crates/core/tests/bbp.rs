mod common;

use common::{noise, to_na, unit_pair};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use spiked_unfold::bbp::{
    beta_hat, critical_snr, empirical_resolvent, master_equation_root, master_equation_root_with,
    predict, tensor_critical_beta, MasterOptions, Resolvent,
};
use spiked_unfold::linalg::{full_singular_values, DenseMatrix};
use spiked_unfold::mp_law::MpLaw;

/// Blocks of `(x - H)^{-1}` for the Hermitization `H = [[0, Z], [Z^T, 0]]`,
/// contracted against `v` and `u`.
fn hermitization_oracle(z: &DenseMatrix, v: &[f64], u: &[f64], x: f64) -> (f64, f64, f64) {
    let (n, m) = (z.rows(), z.cols());
    let zn = to_na(z);
    let mut h = DMatrix::<f64>::zeros(n + m, n + m);
    h.view_mut((0, n), (n, m)).copy_from(&zn);
    h.view_mut((n, 0), (m, n)).copy_from(&zn.transpose());
    let g = (DMatrix::<f64>::identity(n + m, n + m) * x - h)
        .try_inverse()
        .expect("invertible above the spectrum");
    let v = DVector::from_row_slice(v);
    let u = DVector::from_row_slice(u);
    let a = v.dot(&(g.view((0, 0), (n, n)) * &v));
    let b = v.dot(&(g.view((0, n), (n, m)) * &u));
    let c = u.dot(&(g.view((n, n), (m, m)) * &u));
    (a, b, c)
}

#[test]
fn resolvent_matches_dense_hermitization_inverse() {
    for seed in 0..5u64 {
        let z = noise(3, 5, seed);
        let (v, u) = unit_pair(3, 5, seed);
        let s1 = full_singular_values(&z).unwrap()[0];
        for x in [s1 + 0.01, s1 + 0.5, 2.0 * s1 + 3.0] {
            let t = empirical_resolvent(&z, &v, &u, x).unwrap();
            let (a, b, c) = hermitization_oracle(&z, &v, &u, x);
            assert!(
                (t.a - a).abs() <= 1e-10 * a.abs().max(1.0),
                "A {} vs {a}",
                t.a
            );
            assert!(
                (t.b - b).abs() <= 1e-10 * b.abs().max(1.0),
                "B {} vs {b}",
                t.b
            );
            assert!(
                (t.c - c).abs() <= 1e-10 * c.abs().max(1.0),
                "C {} vs {c}",
                t.c
            );
        }
    }
}

#[test]
fn resolvent_asymptotics() {
    let z = noise(10, 30, 4);
    let (v, u) = unit_pair(10, 30, 4);
    let x = 1e4;
    let t = empirical_resolvent(&z, &v, &u, x).unwrap();
    assert!((x * t.a - 1.0).abs() < 1e-6);
    assert!((x * t.c - 1.0).abs() < 1e-6);
}

#[test]
fn resolvent_rejects_points_inside_the_spectrum() {
    let z = noise(10, 30, 4);
    let (v, u) = unit_pair(10, 30, 4);
    let s1 = full_singular_values(&z).unwrap()[0];
    assert!(Resolvent::new(&z, &v, &u).unwrap().at(0.9 * s1).is_err());
    assert!(empirical_resolvent(&z, &v[..5], &u, 10.0).is_err());
}

#[test]
fn master_root_agrees_with_dense_svd() {
    for seed in 0..20u64 {
        let n = 20 + (seed as usize * 3) % 41;
        let m = 4 * n;
        let phi = 2.0;
        let z = noise(n, m, 300 + seed);
        let (v, u) = unit_pair(n, m, seed);
        let beta = 2.0 * f64::sqrt(phi);
        let mut x = z.clone();
        x.add_rank_one(beta, &v, &u);
        let s1 = full_singular_values(&x).unwrap()[0];
        let root = master_equation_root(&z, &v, &u, beta)
            .unwrap()
            .expect("outlier");
        assert!((root - s1).abs() <= 1e-8, "seed {seed}: {root} vs {s1}");
    }
}

#[test]
fn master_root_sub_threshold() {
    let (n, m) = (50, 200);
    for seed in 0..5u64 {
        let z = noise(n, m, 500 + seed);
        let (v, u) = unit_pair(n, m, 500 + seed);
        let beta = 0.5 * f64::sqrt(2.0);
        assert_eq!(master_equation_root(&z, &v, &u, beta).unwrap(), None);
        let mut x = z.clone();
        x.add_rank_one(beta, &v, &u);
        assert!(full_singular_values(&x).unwrap()[0] <= 3.2);
    }
}

#[test]
fn literal_bracket_roots_are_singular_values() {
    // Without the edge window a returned root, if any, must still be a
    // singular value of the perturbed matrix.
    let (n, m) = (50, 200);
    for seed in 0..10u64 {
        let z = noise(n, m, 700 + seed);
        let (v, u) = unit_pair(n, m, 700 + seed);
        let beta = 0.5 * f64::sqrt(2.0);
        let opts = MasterOptions {
            edge_window: Some(0.0),
        };
        if let Some(root) = master_equation_root_with(&z, &v, &u, beta, &opts).unwrap() {
            let mut x = z.clone();
            x.add_rank_one(beta, &v, &u);
            let s = full_singular_values(&x).unwrap();
            assert!(s.iter().any(|sv| (sv - root).abs() < 1e-8));
        }
    }
}

#[test]
fn prediction_consistent_with_stieltjes() {
    for phi in [1.0, 2.0, 10.0, 100.0] {
        let law = MpLaw::new(phi).unwrap();
        for lambda in [1.1, 1.5, 2.0, 3.0] {
            let x = predict(lambda, phi).unwrap().outlier;
            let m = law.stieltjes(Complex64::new(x, 0.0)).unwrap();
            let lhs = m / (x - m);
            assert!(
                (lhs.re - 1.0 / (lambda * lambda * phi)).abs() <= 1e-10 && lhs.im == 0.0,
                "phi {phi} lambda {lambda}: {lhs}"
            );
        }
    }
}

#[test]
fn threshold_helpers() {
    assert_eq!(critical_snr(4.0).unwrap(), 2.0);
    assert_eq!(critical_snr(1.0).unwrap(), 1.0);
    let phi = 16f64.powf(0.5);
    assert_eq!(critical_snr(phi).unwrap(), tensor_critical_beta(16, 3));
}

#[test]
fn continuity_at_threshold() {
    for phi in [1.0, 2.0, 10.0] {
        let p = predict(1.0 + 1e-6, phi).unwrap();
        assert!(p.above_threshold);
        assert!((p.outlier - (phi + 1.0)).abs() < 1e-4);
        // Overlaps vanish like sqrt(lambda - 1).
        assert!(p.left_overlap < 1e-2 && p.right_overlap < 1e-2);
    }
}

proptest! {
    #[test]
    fn round_trip(lambda in 1.0001f64..10.0, phi in 1.0f64..200.0) {
        let p = predict(lambda, phi).unwrap();
        let est = beta_hat(p.outlier, phi);
        prop_assert!(!est.below_threshold);
        prop_assert!((est.value - lambda * phi.sqrt()).abs() <= 1e-9 * lambda * phi.sqrt());
    }

    #[test]
    fn predictions_monotone_and_bounded(
        lambda in 1.001f64..10.0,
        step in 1e-3f64..1.0,
        phi in 1.0f64..200.0,
    ) {
        let a = predict(lambda, phi).unwrap();
        let b = predict(lambda + step, phi).unwrap();
        prop_assert!(b.outlier > a.outlier);
        prop_assert!(b.left_overlap > a.left_overlap);
        prop_assert!(b.right_overlap > a.right_overlap);
        for p in [a, b] {
            prop_assert!((0.0..=1.0).contains(&p.left_overlap));
            prop_assert!((0.0..=1.0).contains(&p.right_overlap));
            prop_assert!(p.outlier > phi + 1.0);
        }
    }

    #[test]
    fn sub_threshold_predictions(lambda in 0.0f64..=1.0, phi in 1.0f64..200.0) {
        let p = predict(lambda, phi).unwrap();
        prop_assert!(!p.above_threshold);
        prop_assert_eq!(p.outlier, phi + 1.0);
        prop_assert_eq!((p.left_overlap, p.right_overlap), (0.0, 0.0));
    }

    #[test]
    fn beta_hat_nonnegative(s in 0.0f64..300.0, phi in 1.0f64..200.0) {
        let est = beta_hat(s, phi);
        prop_assert!(est.value >= 0.0 && est.value.is_finite());
        prop_assert_eq!(est.below_threshold, s <= phi + 1.0);
    }
}
