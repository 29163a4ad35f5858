use std::f64::consts::PI;
use std::sync::Arc;

use faer::Mat;
use homframe::frame::{
    canonical_dual, deformation_sweep, frame_bounds, gaussian_gram_entry, gramian, gramian_numeric, guarded_gram_pseudo_inverse,
    p_lower_bound_probe, CoherentSystem, DualOptions, FrameMode, FrameOptions, ProbeOptions, Regularization, Verdict,
};
use homframe::heisenberg::{stft_points, window, Grid, PhasePoint, WindowKind};
use homframe::linalg::hermitian_eigen;
use homframe::schur::{inverse_decay_experiment, InverseDecayOptions};
use homframe::{c64, Error, GroupSpec, PointSet};
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::line(1024, 1.0 / 32.0)
}

fn lattice(a: f64, b: f64, radius: f64) -> PointSet {
    PointSet::lattice(Arc::new(GroupSpec::abelian(2)), vec![vec![a, 0.0], vec![0.0, b]], radius).unwrap()
}

fn gaussian(a: f64, radius: f64) -> CoherentSystem {
    CoherentSystem::gaussian(&grid(), lattice(a, a, radius)).unwrap()
}

/// Trapezoid rule for `|∫ 2^{1/2} e^{-π t²} e^{-π (t - a)²} dt|`.
fn shifted_overlap(a: f64) -> f64 {
    let h = 1e-3;
    (-20_000..=20_000)
        .map(|k| {
            let t = k as f64 * h;
            2f64.sqrt() * (-PI * t * t).exp() * (-PI * (t - a) * (t - a)).exp() * h
        })
        .sum()
}

fn coords(ps: &PointSet) -> Vec<[f64; 2]> {
    ps.points().iter().map(|p| [p.coords()[0], p.coords()[1]]).collect()
}

#[test]
fn gramian_examples() {
    let cs = gaussian(1.0, 4.0);
    let g = gramian(&cs).unwrap();
    let e = g.entries();
    let n = e.nrows();
    let pts = coords(cs.lattice());
    let mut herm: f64 = 0.0;
    for i in 0..n {
        assert!((e[(i, i)] - c64::new(1.0, 0.0)).norm() < 1e-14);
        for j in 0..n {
            herm = herm.max((e[(i, j)] - e[(j, i)].conj()).norm());
        }
    }
    assert!(herm < 1e-12);
    let o = pts.iter().position(|p| *p == [0.0, 0.0]).unwrap();
    let x = pts.iter().position(|p| *p == [1.0, 0.0]).unwrap();
    let oracle = shifted_overlap(1.0);
    assert!((oracle - 0.2079).abs() < 1e-4);
    assert!((e[(o, x)].norm() - oracle).abs() < 1e-9);
    // entries against sampled short-time Fourier transforms of the atoms
    let win = cs.window().clone();
    for (i, j) in [(o, x), (x, o), (0, n - 1), (n / 3, n / 2)] {
        let atom = cs.atom(j).unwrap();
        let v = stft_points(&atom, &win, &[PhasePoint::line(pts[i][0], pts[i][1])]).unwrap()[0];
        assert!((v - e[(i, j)]).norm() < 1e-9, "({i}, {j})");
    }
}

#[test]
fn numeric_gramian_matches_closed_form() {
    let cs = gaussian(1.0, 4.0);
    let closed = gramian(&cs).unwrap();
    let numeric = gramian_numeric(&cs).unwrap();
    let diff = (closed.entries() - &numeric).norm_max();
    assert!(diff < 1e-9, "{diff}");
    // a window without a recorded kind takes the sampled path
    let plain = CoherentSystem::new(cs.window().clone(), cs.lattice().clone()).unwrap();
    assert!((gramian(&plain).unwrap().entries() - closed.entries()).norm_max() < 1e-9);
}

#[test]
fn frame_bounds_redundant_lattice() {
    let rep = frame_bounds(&gaussian(0.5, 10.0), FrameMode::Frame, &FrameOptions::frame(vec![6.0, 8.0, 10.0])).unwrap();
    assert_eq!(rep.verdict, Verdict::Frame, "{rep:?}");
    assert!(rep.lower_bound > 0.0 && rep.upper_bound.is_finite());
    assert!(rep.monotone);
    for (a, b) in rep.lower_by_truncation.iter().zip(&rep.upper_by_truncation) {
        assert!(0.0 <= *a && a <= b);
    }
    // the Gaussian itself is an interior test vector: ||C g||^2 = Σ e^{-π |λ|^2}
    let theta: f64 = (-40..=40).map(|k| (-PI * 0.25 * (k * k) as f64).exp()).sum();
    assert!(rep.lower_bound <= theta * theta && theta * theta <= rep.upper_bound);
}

#[test]
fn frame_bounds_critical_lattice_degrades() {
    let rep = frame_bounds(&gaussian(1.0, 10.0), FrameMode::Frame, &FrameOptions::frame(vec![6.0, 8.0, 10.0])).unwrap();
    let ratios = rep.ratios();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
    assert!(rep.monotone);
    let theta: f64 = (-20..=20).map(|k| (-PI * (k * k) as f64).exp()).sum();
    assert!(rep.lower_bound <= theta * theta && theta * theta <= rep.upper_bound);
    assert_ne!(rep.verdict, Verdict::Frame);
}

#[test]
fn riesz_bounds_match_gram_eigenvalues() {
    let s = 2f64.sqrt();
    let cs = CoherentSystem::gaussian(&grid(), lattice(s, s, 10.0)).unwrap();
    let radii = vec![6.0, 8.0, 10.0];
    let rep = frame_bounds(&cs, FrameMode::Riesz, &FrameOptions::riesz(radii.clone())).unwrap();
    assert_eq!(rep.verdict, Verdict::Frame);
    for (k, r) in radii.iter().enumerate() {
        let pts = coords(&lattice(s, s, *r));
        let g = Mat::<c64>::from_fn(pts.len(), pts.len(), |i, j| gaussian_gram_entry(pts[i], pts[j]));
        let (vals, _) = hermitian_eigen(g.as_ref()).unwrap();
        assert!((rep.lower_by_truncation[k] - vals[0]).abs() < 1e-8, "{} vs {}", rep.lower_by_truncation[k], vals[0]);
        assert!((rep.upper_by_truncation[k] - vals[vals.len() - 1]).abs() < 1e-8);
    }
    let probe = p_lower_bound_probe(&cs, FrameMode::Riesz, 2.0, &ProbeOptions::new(FrameMode::Riesz, radii, 1)).unwrap();
    assert!((probe.estimate().powi(2) - rep.lower_bound).abs() < 1e-8);
}

#[test]
fn riesz_mode_rejects_unseparated_sets() {
    let pts = vec![vec![0.0, 0.0], vec![1e-12, 0.0], vec![1.0, 0.0]];
    let ps = PointSet::explicit(Arc::new(GroupSpec::abelian(2)), homframe::HomogeneousNorm::WeightedMax, pts, 4.0).unwrap();
    let cs = CoherentSystem::gaussian(&grid(), ps).unwrap();
    assert!(matches!(frame_bounds(&cs, FrameMode::Riesz, &FrameOptions::riesz(vec![4.0])), Err(Error::NotSeparated)));
}

#[test]
fn p2_probe_reproduces_frame_bounds() {
    let cs = gaussian(0.5, 8.0);
    let radii = vec![6.0, 8.0];
    let rep = frame_bounds(&cs, FrameMode::Frame, &FrameOptions::frame(radii.clone())).unwrap();
    let probe = p_lower_bound_probe(&cs, FrameMode::Frame, 2.0, &ProbeOptions::new(FrameMode::Frame, radii, 3)).unwrap();
    for (a, p) in rep.lower_by_truncation.iter().zip(&probe.lower_by_truncation) {
        assert!((p * p - a).abs() < 1e-8);
    }
    assert!(p_lower_bound_probe(&cs, FrameMode::Frame, 3.0, &ProbeOptions::new(FrameMode::Frame, vec![6.0], 3)).is_err());
}

#[test]
fn scaling_window_scales_bounds() {
    let cs = gaussian(0.5, 6.0);
    let opts = FrameOptions::frame(vec![4.0, 6.0]);
    let base = frame_bounds(&cs, FrameMode::Frame, &opts).unwrap();
    let c = c64::new(0.0, 2.0);
    let scaled = frame_bounds(&cs.scaled(c).unwrap(), FrameMode::Frame, &opts).unwrap();
    for (a, b) in base.lower_by_truncation.iter().zip(&scaled.lower_by_truncation) {
        assert!((b - 4.0 * a).abs() < 1e-8 * b.max(1.0));
    }
    assert!((scaled.ratio() - base.ratio()).abs() < 1e-9);
    assert_eq!(scaled.verdict, base.verdict);
}

#[test]
fn canonical_dual_of_orthonormal_system() {
    let cs = CoherentSystem::gaussian(&grid(), lattice(8.0, 8.0, 10.0)).unwrap();
    let opts = DualOptions { regularization: Regularization::SpectralFloor, ..DualOptions::default() };
    let dual = canonical_dual(&cs, &opts).unwrap();
    assert_eq!(dual.retained_rank, cs.len());
    let atoms = cs.atom_matrix().unwrap();
    assert!((dual.dual_atoms() - &atoms).norm_max() < 1e-6);
    let id = dual.coefficients().entries() - Mat::<c64>::identity(cs.len(), cs.len());
    assert!(id.norm_max() < 1e-6);
}

#[test]
fn canonical_dual_reconstructs_hermite_signals() {
    let dual = canonical_dual(&gaussian(0.5, 8.0), &DualOptions::default()).unwrap();
    for k in 0..4 {
        let f = window(&grid(), WindowKind::Hermite(k)).unwrap();
        let res = dual.reconstruction_residual(&f).unwrap();
        assert!(res < 1e-6, "h_{k}: {res}");
    }
    assert!(dual.decay_fit.exponent >= 4.0, "{:?}", dual.decay_fit);
}

#[test]
fn canonical_dual_refuses_sparse_lattice() {
    let cs = gaussian(2.0, 8.0);
    assert!(matches!(canonical_dual(&cs, &DualOptions::default()), Err(Error::IllConditioned { .. })));
    let opts = DualOptions { regularization: Regularization::SpectralFloor, ..DualOptions::default() };
    assert!(canonical_dual(&cs, &opts).is_ok());
}

#[test]
fn guarded_pseudo_inverse_decays() {
    let cs = gaussian(0.5, 13.0);
    let (g, block) = guarded_gram_pseudo_inverse(&cs, 8.0, 5.0, 1e-8).unwrap();
    let mut o = InverseDecayOptions::for_matrix(&g);
    o.pseudo_inverse = Some(block);
    let rep = inverse_decay_experiment(&g, &o).unwrap();
    assert!(rep.s_out >= 4.0, "{}", rep.s_out);
}

#[test]
fn sweep_identity_row_and_persistence() {
    let cs = gaussian(0.5, 8.0);
    let opts = FrameOptions::frame(vec![6.0, 8.0]);
    let rs = [0.9, 0.95, 1.0, 1.05, 1.1];
    let sweep = deformation_sweep(&cs, &rs, FrameMode::Frame, &opts).unwrap();
    let base = frame_bounds(&cs, FrameMode::Frame, &opts).unwrap();
    let row = sweep.rows.iter().find(|r| r.r == 1.0).unwrap();
    assert_eq!((row.lower, row.upper), (base.lower_bound, base.upper_bound));
    assert!((row.density - 4.0).abs() < 1e-12);
    assert!(sweep.rows.iter().all(|r| r.lower > 0.0));
    assert!(sweep.persistent && sweep.continuous);
    assert!(deformation_sweep(&cs, &[0.5], FrameMode::Frame, &opts).is_err());
}

#[test]
fn sweep_toward_critical_density_loses_lower_bound() {
    let cs = gaussian(0.95, 8.0);
    let rs = [0.9, 0.95, 1.0, 1.05];
    let sweep = deformation_sweep(&cs, &rs, FrameMode::Frame, &FrameOptions::frame(vec![6.0, 8.0])).unwrap();
    let lower: Vec<f64> = sweep.rows.iter().map(|r| r.lower).collect();
    assert!(lower.windows(2).all(|w| w[1] < w[0]), "{lower:?}");
    let dens: Vec<f64> = sweep.rows.iter().map(|r| r.density).collect();
    assert!(dens.windows(2).all(|w| w[1] < w[0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn frame_bounds_scale_with_window_amplitude(re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let c = c64::new(re, im);
        prop_assume!(c.norm() > 0.1);
        let cs = gaussian(0.6, 5.0);
        let opts = FrameOptions::frame(vec![5.0]);
        let base = frame_bounds(&cs, FrameMode::Frame, &opts).unwrap();
        let s = frame_bounds(&cs.scaled(c).unwrap(), FrameMode::Frame, &opts).unwrap();
        let k = c.norm_sqr();
        prop_assert!((s.lower_bound - k * base.lower_bound).abs() < 1e-8 * k.max(1.0));
        prop_assert!((s.upper_bound - k * base.upper_bound).abs() < 1e-8 * k.max(1.0) * base.upper_bound);
    }

    #[test]
    fn gram_is_hermitian_and_positive(a in 0.5f64..1.5) {
        let g = gramian(&gaussian(a, 4.0)).unwrap();
        let e = g.entries();
        let n = e.nrows();
        let sym = Mat::<c64>::from_fn(n, n, |i, j| (e[(i, j)] + e[(j, i)].conj()) * 0.5);
        prop_assert!((e - &sym).norm_max() < 1e-12);
        let (vals, _) = hermitian_eigen(sym.as_ref()).unwrap();
        prop_assert!(vals[0] > -1e-10);
    }
}
