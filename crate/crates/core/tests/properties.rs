//! Randomized invariants of the numerical kernels, with nalgebra as an
//! independent oracle for eigenvalues and ranks.

use approx::assert_relative_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use osserman_core::catalog::*;
use osserman_core::linalg::eigen::{eigenvalues, symmetric_eigenvalues};
use osserman_core::linalg::{char_poly, power_traces, rank, spectral_summary, SquareMatrix};
use osserman_core::poly::Polynomial;
use proptest::prelude::*;

fn matrix(n: usize) -> impl Strategy<Value = SquareMatrix> {
    prop::collection::vec(-2.0f64..2.0, n * n).prop_map(move |d| SquareMatrix::new(n, d).unwrap())
}

fn to_na(m: &SquareMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.dim(), m.dim(), m.as_slice())
}

fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

/// Greedy matching distance between two multisets of complex numbers.
fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut rest: Vec<Complex64> = b.to_vec();
    let mut worst: f64 = 0.0;
    for z in a {
        let (i, d) = rest
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (z - w).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        worst = worst.max(d);
        rest.swap_remove(i);
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_match_nalgebra(m in (2usize..7).prop_flat_map(matrix)) {
        let ours = eigenvalues(&m).unwrap();
        let theirs: Vec<Complex64> = to_na(&m).complex_eigenvalues().iter().copied().collect();
        prop_assert!(multiset_distance(&ours, &theirs) < 1e-8, "{:?} vs {:?}", sorted(ours), sorted(theirs));
    }

    #[test]
    fn eigenvalue_sum_is_trace_and_product_is_determinant(m in (2usize..7).prop_flat_map(matrix)) {
        let ev = eigenvalues(&m).unwrap();
        let sum: Complex64 = ev.iter().sum();
        let prod: Complex64 = ev.iter().product();
        prop_assert!((sum.re - m.trace()).abs() < 1e-9 && sum.im.abs() < 1e-9);
        prop_assert!((prod.re - to_na(&m).determinant()).abs() < 1e-8 * (1.0 + prod.norm()));
    }

    #[test]
    fn power_traces_agree_with_matrix_powers(m in (1usize..6).prop_flat_map(matrix)) {
        let t = power_traces(&m, m.dim()).unwrap();
        for (k, tk) in t.iter().enumerate() {
            let direct = m.pow(k + 1).trace();
            prop_assert!((tk - direct).abs() <= 1e-9 * (1.0 + direct.abs()), "k={} {} vs {}", k + 1, tk, direct);
        }
    }

    #[test]
    fn char_poly_vanishes_on_eigenvalues(m in (1usize..6).prop_flat_map(matrix)) {
        let c = char_poly(&m).unwrap();
        for z in eigenvalues(&m).unwrap() {
            let scale: f64 = c.iter().map(|a| a.abs() * z.norm().max(1.0).powi(c.len() as i32)).sum();
            let v = c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a); // ascending coefficients
            prop_assert!(v.norm() <= 1e-9 * scale.max(1.0), "residual {} at {}", v.norm(), z);
        }
    }

    #[test]
    fn rank_matches_svd_rank(
        (n, r, seed) in (2usize..7).prop_flat_map(|n| (Just(n), 0..=n, any::<u64>()))
    ) {
        // product of n×r and r×n factors has rank r generically
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::<f64>::from_fn(n, r, |_, _| rng.gen_range(-1.0..1.0));
        let b = DMatrix::<f64>::from_fn(r, n, |_, _| rng.gen_range(-1.0..1.0));
        let p = &a * &b;
        let m = SquareMatrix::from_fn(n, |i, j| p[(i, j)]);
        let svd_rank = p.clone().svd(false, false).rank(1e-9 * p.norm().max(1e-300));
        prop_assert_eq!(rank(&m, 1e-9).unwrap(), svd_rank);
        prop_assert_eq!(svd_rank, r);
        // rank + nullity = n, nullity read from the spectrum summary at zero
        if r < n {
            let s = spectral_summary(&m, 1e-7).unwrap();
            let zero = s.entry_near(Complex64::new(0.0, 0.0), 1e-9).map_or(0, |e| e.geom_mult);
            prop_assert_eq!(zero + r, n);
        }
    }

    #[test]
    fn symmetric_matrices_are_diagonalizable_with_real_spectrum(m in (2usize..7).prop_flat_map(matrix)) {
        let sym = SquareMatrix::from_fn(m.dim(), |i, j| 0.5 * (m.get(i, j) + m.get(j, i)));
        let summary = spectral_summary(&sym, 1e-7).unwrap();
        prop_assert!(summary.is_diagonalizable(), "{:?}", summary.entries);
        prop_assert!(summary.expanded().iter().all(|z| z.im == 0.0));
        let jac = symmetric_eigenvalues(&sym);
        let mut ours: Vec<f64> = summary.expanded().iter().map(|z| z.re).collect();
        ours.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&jac) {
            prop_assert!((a - b).abs() < 1e-6, "{:?} vs {:?}", ours, jac);
        }
    }

    #[test]
    fn jacobi_operator_kills_its_direction_and_is_quadratic(
        v in prop::collection::vec(-1.0f64..1.0, 4),
        t in 0.1f64..3.0,
        eps in -2.0f64..2.0,
    ) {
        let a = build_complex_model(2, 1.0, 0.5, eps).unwrap();
        let j = a.jacobi(&v).unwrap();
        let jv = j.mul_vec(&v);
        prop_assert!(jv.iter().all(|x| x.abs() < 1e-12), "{:?}", jv);
        let tv: Vec<f64> = v.iter().map(|x| t * x).collect();
        let jt = a.jacobi(&tv).unwrap();
        prop_assert!(jt.sub(&j.scale(t * t)).max_abs() <= 1e-12 * (1.0 + t * t));
    }

    #[test]
    fn polynomial_jets_match_finite_differences(
        coeffs in prop::collection::vec(-1.0f64..1.0, 6),
        p in prop::collection::vec(-1.0f64..1.0, 2),
    ) {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let basis = [
            Polynomial::constant(2, 1.0),
            x.clone(),
            y.clone(),
            x.mul(&y),
            x.mul(&x).mul(&y),
            y.mul(&y).mul(&y),
        ];
        let f = basis.iter().zip(&coeffs).fold(Polynomial::zero(2), |acc, (b, c)| acc.add(&b.scale(*c)));
        let jet = f.eval_jet2(&p);
        let h = 1e-5;
        for i in 0..2 {
            let mut up = p.clone();
            up[i] += h;
            let mut dn = p.clone();
            dn[i] -= h;
            let fd = (f.eval(&up) - f.eval(&dn)) / (2.0 * h);
            prop_assert!((jet.gradient[i] - fd).abs() < 1e-7);
            for j in 0..2 {
                let mut upj = up.clone();
                upj[j] += h;
                let mut dnj = up.clone();
                dnj[j] -= h;
                let mut upj2 = dn.clone();
                upj2[j] += h;
                let mut dnj2 = dn.clone();
                dnj2[j] -= h;
                let fd2 = ((f.eval(&upj) - f.eval(&dnj)) - (f.eval(&upj2) - f.eval(&dnj2))) / (4.0 * h * h);
                prop_assert!((jet.hess(i, j) - fd2).abs() < 1e-4, "{} vs {}", jet.hess(i, j), fd2);
            }
        }
    }
}

#[test]
fn curvature_of_random_connections_satisfies_model_identities() {
    for seed in 0..20 {
        let c = build_nilpotent_connection(4, 3, seed).unwrap();
        let r = c.curvature_at(&[0.3, -0.7, 1.1, 0.2]).unwrap();
        assert!(r.validate_with_tol(1e-10).is_valid(), "seed {seed}");
    }
}

#[test]
fn fubini_study_spectrum_against_nalgebra() {
    let a = build_complex_model(3, 1.0, 1.0, 0.0).unwrap();
    let v = [0.6, 0.0, 0.0, 0.8, 0.0, 0.0];
    let ev = to_na(&a.jacobi(&v).unwrap()).symmetric_eigenvalues();
    let mut ev: Vec<f64> = ev.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    for (got, want) in ev.iter().zip([0.0, 1.0, 1.0, 1.0, 1.0, 4.0]) {
        assert_relative_eq!(*got, want, epsilon = 1e-12);
    }
}
