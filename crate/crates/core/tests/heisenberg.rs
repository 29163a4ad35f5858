use std::f64::consts::PI;

use homframe::c64;
use homframe::heisenberg::{
    apply_pi, apply_pi_with, cocycle, integrable_norm, stft, stft_points, verify_orthogonality, window, Grid, PhaseConvention,
    PhasePoint, Signal, WindowKind,
};
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::line(512, 1.0 / 16.0)
}

fn big_grid() -> Grid {
    Grid::line(1024, 1.0 / 32.0)
}

fn max_err(a: &Signal, b: &Signal, phase: c64) -> f64 {
    a.samples().iter().zip(b.samples()).map(|(x, y)| (x - phase * y).norm()).fold(0.0, f64::max)
}

/// Composite trapezoid rule for `∫ 2^{1/2} e^{-π t²} e^{-π (t - x)²} e^{-2πi ω t} dt` on a fine grid.
fn gaussian_ambiguity_quadrature(x: f64, omega: f64) -> c64 {
    let h = 1e-3;
    let n = 20_000;
    (-n..=n)
        .map(|k| {
            let t = k as f64 * h;
            let w = 2f64.sqrt() * (-PI * t * t).exp() * (-PI * (t - x) * (t - x)).exp();
            c64::from_polar(w * h, -2.0 * PI * omega * t)
        })
        .sum()
}

#[test]
fn identity_element_acts_trivially() {
    let g = window(&grid(), WindowKind::TwoSidedExponential).unwrap();
    assert_eq!(apply_pi(&g, &PhasePoint::line(0.0, 0.0)).unwrap(), g);
}

#[test]
fn stft_examples() {
    let g = window(&grid(), WindowKind::Gaussian).unwrap();
    let v = stft(&g, &g, &[0.0, 1.0], &[0.0]).unwrap();
    assert!((v.at(0, 0) - c64::new(1.0, 0.0)).norm() < 1e-12);
    let oracle = gaussian_ambiguity_quadrature(1.0, 0.0);
    assert!((oracle.norm() - (-PI / 2.0).exp()).abs() < 1e-9);
    assert!((v.at(1, 0).norm() - oracle.norm()).abs() < 1e-8);
    for (x, w) in [(0.7, -1.3), (-2.0, 0.4), (1.5, 1.5)] {
        let got = stft_points(&g, &g, &[PhasePoint::line(x, w)]).unwrap()[0];
        assert!((got - gaussian_ambiguity_quadrature(x, w)).norm() < 1e-8, "({x}, {w})");
    }
    assert!(stft(&g, &Signal::zeros(grid()), &[0.0], &[0.0]).is_err());
}

#[test]
fn orthogonality_relations() {
    let gr = big_grid();
    let g = window(&gr, WindowKind::Gaussian).unwrap();
    let h1 = window(&gr, WindowKind::Hermite(1)).unwrap();
    let r = verify_orthogonality(&g, &g, &g, &g, 12.0, 0.125).unwrap();
    assert!((r.integral.re - 1.0).abs() < 1e-3 && r.integral.im.abs() < 1e-3);
    assert!((r.formal_dimension.unwrap() - 1.0).abs() < 1e-3);
    let cross = verify_orthogonality(&g, &h1, &g, &g, 12.0, 0.125).unwrap();
    assert!(cross.integral.norm() < 1e-6);
    assert!(cross.formal_dimension.is_none());
}

#[test]
fn moyal_identity_on_test_family() {
    let gr = big_grid();
    let fam: Vec<Signal> = [WindowKind::Gaussian, WindowKind::Hermite(1), WindowKind::Hermite(2), WindowKind::Hermite(3)]
        .into_iter()
        .map(|k| window(&gr, k).unwrap())
        .collect();
    let mixed = Signal::new(
        gr.clone(),
        fam[0].samples().iter().zip(fam[2].samples()).map(|(a, b)| a * 0.6 + b * c64::new(0.0, 0.8)).collect(),
    )
    .unwrap();
    let sigs = [&fam[0], &fam[1], &fam[3], &mixed];
    for (f1, f2, g1, g2) in [(0, 3, 0, 3), (1, 1, 3, 0), (3, 0, 2, 2), (2, 2, 1, 1)] {
        let r = verify_orthogonality(sigs[f1], sigs[f2], sigs[g1], sigs[g2], 12.0, 0.125).unwrap();
        assert!((r.integral - r.expected).norm() < 1e-3, "{f1}{f2}{g1}{g2}: {:?}", r);
    }
}

#[test]
fn covariance_of_stft_magnitudes() {
    let g = window(&grid(), WindowKind::Gaussian).unwrap();
    let f = window(&grid(), WindowKind::Hermite(2)).unwrap();
    let mu = PhasePoint::line(0.8, -0.45);
    let shifted = apply_pi(&f, &mu).unwrap();
    let lams: Vec<PhasePoint> = [(0.0, 0.0), (1.1, 0.3), (-0.7, -1.2), (2.0, 1.0)].iter().map(|&(x, w)| PhasePoint::line(x, w)).collect();
    let moved: Vec<PhasePoint> = lams.iter().map(|l| PhasePoint::line(l.x[0] - mu.x[0], l.omega[0] - mu.omega[0])).collect();
    let a = stft_points(&shifted, &g, &lams).unwrap();
    let b = stft_points(&f, &g, &moved).unwrap();
    for (u, v) in a.iter().zip(&b) {
        assert!((u.norm() - v.norm()).abs() < 1e-9);
    }
}

#[test]
fn gaussian_ambiguity_is_rapidly_decreasing() {
    let g = window(&big_grid(), WindowKind::Gaussian).unwrap();
    let xs: Vec<f64> = (0..=24).map(|k| k as f64 * 0.5).collect();
    let v = stft(&g, &g, &xs, &[0.0]).unwrap();
    for n in 1..=8 {
        let weighted: Vec<f64> = (0..xs.len()).map(|i| (1.0 + xs[i]).powi(n) * v.at(i, 0).norm()).collect();
        let peak = weighted.iter().cloned().fold(0.0, f64::max);
        // the weighted profile peaks early and is negligible at the edge of the test grid
        assert!(*weighted.last().unwrap() < 1e-20 * peak.max(1.0), "N = {n}");
    }
}

#[test]
fn integrable_norm_examples() {
    let gr = big_grid();
    let g = window(&gr, WindowKind::Gaussian).unwrap();
    let r = integrable_norm(&g, 8.0, 0.125).unwrap();
    assert!((r.value - 2.0).abs() < 1e-3, "{r:?}");
    assert!(!r.divergent);

    let e = integrable_norm(&window(&gr, WindowKind::TwoSidedExponential).unwrap(), 12.0, 0.125).unwrap();
    assert!(!e.divergent && e.value.is_finite(), "{e:?}");

    let s = integrable_norm(&window(&gr, WindowKind::Sinc).unwrap(), 12.0, 0.125).unwrap();
    assert!(s.divergent, "{s:?}");
}

fn phase() -> impl Strategy<Value = PhasePoint> {
    (-4.0f64..4.0, -4.0f64..4.0).prop_map(|(x, w)| PhasePoint::line(x, w))
}

fn conv() -> impl Strategy<Value = PhaseConvention> {
    prop_oneof![Just(PhaseConvention::TranslationFirst), Just(PhaseConvention::Symmetric)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn representation_is_unitary(l in phase(), c in conv()) {
        let g = window(&grid(), WindowKind::Hermite(2)).unwrap();
        let out = apply_pi_with(&g, &l, c).unwrap();
        prop_assert!((out.norm() - g.norm()).abs() < 1e-10);
    }

    #[test]
    fn composition_follows_cocycle(a in phase(), b in phase(), c in conv()) {
        let g = window(&grid(), WindowKind::Gaussian).unwrap();
        let ab = PhasePoint::line(a.x[0] + b.x[0], a.omega[0] + b.omega[0]);
        prop_assume!(ab.x[0].abs() < 6.0 && ab.omega[0].abs() < 6.0);
        let lhs = apply_pi_with(&apply_pi_with(&g, &b, c).unwrap(), &a, c).unwrap();
        let rhs = apply_pi_with(&g, &ab, c).unwrap();
        prop_assert!(max_err(&lhs, &rhs, cocycle(&a, &b, c)) < 1e-9);
    }

    #[test]
    fn cocycle_identities(a in phase(), b in phase(), d in phase(), c in conv()) {
        let zero = PhasePoint::line(0.0, 0.0);
        let sum = |p: &PhasePoint, q: &PhasePoint| PhasePoint::line(p.x[0] + q.x[0], p.omega[0] + q.omega[0]);
        prop_assert!((cocycle(&a, &b, c).norm() - 1.0).abs() < 1e-14);
        prop_assert!((cocycle(&zero, &a, c) - c64::new(1.0, 0.0)).norm() < 1e-14);
        prop_assert!((cocycle(&a, &zero, c) - c64::new(1.0, 0.0)).norm() < 1e-14);
        let lhs = cocycle(&a, &b, c) * cocycle(&sum(&a, &b), &d, c);
        let rhs = cocycle(&a, &sum(&b, &d), c) * cocycle(&b, &d, c);
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn stft_bounded_by_norms(x in -6.0f64..6.0, w in -6.0f64..6.0) {
        let g = window(&grid(), WindowKind::Gaussian).unwrap();
        let f = window(&grid(), WindowKind::TwoSidedExponential).unwrap();
        let v = stft_points(&f, &g, &[PhasePoint::line(x, w)]).unwrap()[0];
        prop_assert!(v.norm() <= f.norm() * g.norm() * (1.0 + 1e-12));
    }
}
