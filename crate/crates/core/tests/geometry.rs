//! Cross-module checks of the geometric constructions.

use osserman_core::catalog::*;
use osserman_core::connection::{AffineConnection, GeodesicOutcome};
use osserman_core::linalg::{spectral_summary, SpectralOptions, SpectralSummary};
use osserman_core::metric::*;
use osserman_core::model::{CheckConfig, DirectionSampler, VerdictKind};
use osserman_core::poly::Polynomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn real_spectrum(s: &SpectralSummary) -> Vec<f64> {
    s.expanded().iter().map(|z| z.re).collect()
}

fn assert_close_vec(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
    }
}

#[test]
fn m_eps_connection_realizes_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in 3..=5 {
        for eps in [0.0, 1.0, -2.0] {
            let c = build_m_eps_connection(m, eps).unwrap();
            let a = build_m_eps_model(m, eps).unwrap();
            assert!(a.validate().is_valid());
            for _ in 0..5 {
                let r = c.curvature_at(&random_point(&mut rng, m)).unwrap();
                let diff = r.add_scaled(-1.0, &a).unwrap().max_abs();
                assert!(diff <= 1e-12, "m={m} eps={eps} diff={diff}");
            }
        }
    }
}

#[test]
fn m_eps_realization_uses_derivative_not_value() {
    let c = build_m_eps_connection(4, 2.0).unwrap();
    let p = [1.0, -1.0, 0.0, 0.0];
    assert_eq!(c.gamma(0, 0, 0).eval(&p), 0.0);
    assert_eq!(c.curvature_at(&p).unwrap().get(1, 0, 0, 0), 2.0);
}

#[test]
fn nabla_r_entries() {
    let m = 3;
    let c0 = build_m_eps_connection(m, 0.0).unwrap();
    let last = m - 1;
    // Expansion ∇_{∂_m} R(∂_m, ∂_1) ∂_1 − ... = (2 − 2 − 2) ∂_m
    let v = c0
        .covariant_derivative_r_at(&[0.2, 0.1, -0.3], last, 0, 0, last)
        .unwrap();
    assert_close_vec(&v, &[0.0, 0.0, -2.0], 1e-12);
    // Differentiating along ∂_1 instead gives 2 ∂_1.
    let w = c0
        .covariant_derivative_r_at(&[0.2, 0.1, -0.3], last, 0, 0, 0)
        .unwrap();
    assert_close_vec(&w, &[2.0, 0.0, 0.0], 1e-12);

    let c1 = build_m_eps_connection(m, 1.0).unwrap();
    let v = c1
        .covariant_derivative_r_at(&[1.0, 1.0, 0.0], 1, 0, 0, 0)
        .unwrap();
    assert!((v[1] + 4.0).abs() < 1e-12, "{v:?}");
}

#[test]
fn geodesic_blowup_of_m0() {
    let c = build_m_eps_connection(3, 0.0).unwrap();
    let down = c
        .geodesic_integrate(&[0.0; 3], &[0.0, 0.0, -1.0], 2.0, 1e-4, 1e6)
        .unwrap();
    let GeodesicOutcome::BlewUpAt { t } = down.outcome else {
        panic!("expected blow-up")
    };
    // ẍ + 2ẋ² = 0 along the last coordinate: ẋ = ẋ₀ / (1 + 2ẋ₀t), pole at t = 1/2.
    assert!((t - 0.5).abs() < 1e-3, "t = {t}");
    let up = c
        .geodesic_integrate(&[0.0; 3], &[0.0, 0.0, 1.0], 1.0, 1e-4, 1e6)
        .unwrap();
    assert_eq!(up.outcome, GeodesicOutcome::Completed);
    let last = up.trajectory.last().unwrap();
    assert!((last.v[2] - 1.0 / 3.0).abs() < 1e-10);
}

#[test]
fn modified_extension_spectra() {
    let opts = SpectralOptions::default();
    for (m, seed) in [(2, 1), (3, 2)] {
        let base = build_nilpotent_connection(m, 2, seed).unwrap();
        let g = modified_extension(&base);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_point(&mut rng, 2 * m);
        for sign in [1, -1] {
            let dirs = pseudo_sphere_sample(&g, &p, sign, 10, seed).unwrap();
            let r = g.curvature_at(&p).unwrap();
            for d in dirs {
                let s = osserman_core::linalg::spectral_summary_with(&r.jacobi(&d).unwrap(), &opts)
                    .unwrap();
                let mut want = vec![0.0, 1.0];
                want.extend(std::iter::repeat_n(0.25, 2 * m - 2));
                let mut want: Vec<f64> = want.into_iter().map(|v| v * sign as f64).collect();
                want.sort_by(f64::total_cmp);
                assert_close_vec(&real_spectrum(&s), &want, 1e-6);
            }
        }
    }
}

#[test]
fn deformed_extension_of_nilpotent_base_is_nilpotent() {
    let base = build_nilpotent_connection(3, 2, 5).unwrap();
    let phi = random_symmetric_tensor(3, 1, 9);
    let g = deformed_extension(&base, &phi).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = random_point(&mut rng, 6);
    for sign in [1, -1] {
        let rep = check_metric_projective_osserman(
            &g,
            std::slice::from_ref(&p),
            sign,
            20,
            4,
            &CheckConfig::default(),
        )
        .unwrap();
        assert_eq!(rep.verdict.kind, VerdictKind::AffineOsserman);
    }
}

#[test]
fn spectrum_transfer_and_block_form() {
    let c = build_m_eps_connection(3, 1.0).unwrap();
    let phi = random_symmetric_tensor(3, 1, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let p =
            CotangentChartPoint::new(random_point(&mut rng, 3), random_point(&mut rng, 3)).unwrap();
        let xi = random_point(&mut rng, 6);
        let rep =
            verify_spectrum_transfer(&c, &phi, &p, &xi, 1e-6, &SpectralOptions::default()).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(
            rep.block_residual < 1e-10,
            "block residual {}",
            rep.block_residual
        );
    }
}

#[test]
fn product_sphere_curvature_matches_closed_form() {
    let g = build_product_sphere_metric(1, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let p = random_point(&mut rng, 3);
        let ad = g.curvature_at(&p).unwrap();
        let cf = product_sphere_curvature(1, 2, &p).unwrap();
        assert!(ad.add_scaled(-1.0, &cf).unwrap().max_abs() < 1e-10);
    }
    // unit vector tangent to the sphere factor at the origin: g = 4δ there
    let s = spectral_summary(&g.jacobi_at(&[0.0; 3], &[0.0, 0.5, 0.0]).unwrap(), 1e-7).unwrap();
    assert_close_vec(&real_spectrum(&s), &[0.0, 0.0, 1.0], 1e-12);
    assert_eq!(
        g.jacobi_at(&[0.0; 3], &[1.0, 0.0, 0.0]).unwrap().max_abs(),
        0.0
    );
}

#[test]
fn product_metric_verdicts() {
    let cfg = CheckConfig::default();
    for (p, q) in [(1, 2), (2, 3)] {
        let g = build_product_sphere_metric(p, q).unwrap();
        let pts = vec![vec![0.0; p + q], vec![0.3; p + q]];
        let space = check_metric_projective_osserman(&g, &pts, 1, 30, 5, &cfg).unwrap();
        assert_eq!(space.verdict.kind, VerdictKind::AffineProjectiveOsserman);
        let time = check_metric_projective_osserman(&g, &pts, -1, 30, 5, &cfg).unwrap();
        assert_eq!(time.verdict.kind, VerdictKind::Neither);
        let w = time.verdict.witness.unwrap();
        assert!(w.direction[p..].iter().all(|x| x.abs() < 1e-8));
        assert!(w.spectrum.is_nilpotent());
    }
}

#[test]
fn levi_civita_compatibility() {
    let base = build_m_eps_connection(3, 1.0).unwrap();
    let g = deformed_extension(&base, &random_symmetric_tensor(3, 2, 1)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let p = random_point(&mut rng, 6);
        let jet = g.jet_at(&p).unwrap();
        let c = g.levi_civita_at(&p).unwrap();
        let n = 6;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut r = jet.dg[(k * n + i) * n + j];
                    for l in 0..n {
                        r -= c.get(k, i, l) * jet.g.get(l, j) + c.get(k, j, l) * jet.g.get(i, l);
                    }
                    assert!(r.abs() < 1e-8);
                }
            }
        }
        // pair symmetry after lowering the last index
        let rc = g.curvature_at(&p).unwrap();
        let low = |i: usize, j: usize, k: usize, l: usize| {
            (0..n)
                .map(|a| rc.get(i, j, k, a) * jet.g.get(a, l))
                .sum::<f64>()
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        assert!((low(i, j, k, l) - low(k, l, i, j)).abs() < 1e-8);
                    }
                }
            }
        }
    }
}

#[test]
fn flat_connection_extension_is_flat_metric() {
    let g = deformed_extension(
        &AffineConnection::flat(2),
        &osserman_core::metric::SymmetricTwoTensor::zero(2),
    )
    .unwrap();
    assert_eq!(
        g.curvature_at(&[0.1, 0.2, 0.3, 0.4]).unwrap().max_abs(),
        0.0
    );
    let _ = Polynomial::zero(1);
    let _ = DirectionSampler::new(1, 0);
}
