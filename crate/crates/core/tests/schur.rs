use std::f64::consts::PI;
use std::sync::Arc;

use faer::Mat;
use homframe::frame::gaussian_gram_entry;
use homframe::linalg::{hermitian_eigen, singular_values};
use homframe::pointset::separation;
use homframe::schur::{
    amalgam_norms, build_envelope, envelope_product, lift_idempotent, partition_of_unity, schur_norm, AmalgamGrid,
    EnvelopeFunction, LocalizedMatrix, ProductOptions,
};
use homframe::{c64, GroupSpec, HomogeneousNorm, PointSet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn plane() -> Arc<GroupSpec> {
    Arc::new(GroupSpec::abelian(2))
}

fn lattice(a: f64, radius: f64) -> PointSet {
    PointSet::lattice(plane(), vec![vec![a, 0.0], vec![0.0, a]], radius).unwrap()
}

fn coords2(ps: &PointSet) -> Vec<[f64; 2]> {
    ps.points().iter().map(|p| [p.coords()[0], p.coords()[1]]).collect()
}

/// Random matrix with entries decaying like `e^{-decay |λ - γ|}`.
fn random_localized(rows: &PointSet, cols: &PointSet, decay: f64, rng: &mut ChaCha8Rng) -> LocalizedMatrix {
    let (r, c) = (coords2(rows), coords2(cols));
    let m = Mat::<c64>::from_fn(r.len(), c.len(), |i, j| {
        let d = (r[i][0] - c[j][0]).abs().max((r[i][1] - c[j][1]).abs());
        c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * (-decay * d).exp()
    });
    LocalizedMatrix::new(rows.clone(), cols.clone(), m).unwrap()
}

/// Weighted row and column sums recomputed from coordinates.
fn oracle_schur(a: &LocalizedMatrix, alpha: f64) -> f64 {
    let (r, c) = (coords2(a.rows()), coords2(a.cols()));
    let e = a.entries();
    let w = |i: usize, j: usize| {
        let d = (r[i][0] - c[j][0]).abs().max((r[i][1] - c[j][1]).abs());
        e[(i, j)].norm() * (1.0 + d).powf(alpha)
    };
    let row = (0..r.len()).map(|i| (0..c.len()).map(|j| w(i, j)).sum::<f64>()).fold(0.0, f64::max);
    let col = (0..c.len()).map(|j| (0..r.len()).map(|i| w(i, j)).sum::<f64>()).fold(0.0, f64::max);
    row.max(col)
}

#[test]
fn schur_norm_examples() {
    let ps = lattice(1.0, 3.0);
    for alpha in [0.0, 2.0, 5.0] {
        assert_eq!(schur_norm(&LocalizedMatrix::identity(ps.clone()), alpha).norm, 1.0);
    }
    let two = PointSet::explicit(plane(), HomogeneousNorm::WeightedMax, vec![vec![0.0, 0.0], vec![0.0, 1.0]], 2.0).unwrap();
    let m = Mat::<c64>::from_fn(2, 2, |i, j| c64::new([[1.0, 2.0], [3.0, 4.0]][i][j], 0.0));
    let r = schur_norm(&LocalizedMatrix::new(two.clone(), two, m).unwrap(), 0.0);
    assert_eq!((r.row_sum_sup, r.col_sum_sup, r.norm), (7.0, 6.0, 7.0));
}

#[test]
fn schur_norm_matches_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rows = lattice(1.0, 4.0);
    let cols = lattice(0.75, 3.0);
    for alpha in [0.0, 1.0, 3.0] {
        let a = random_localized(&rows, &cols, 0.8, &mut rng);
        let got = schur_norm(&a, alpha).norm;
        assert!((got - oracle_schur(&a, alpha)).abs() <= 1e-12 * got);
    }
}

#[test]
fn gaussian_gram_envelope_is_dominated_by_ambiguity_bins() {
    let ps = lattice(0.5, 4.0);
    let pts = coords2(&ps);
    let m = Mat::<c64>::from_fn(pts.len(), pts.len(), |i, j| gaussian_gram_entry(pts[i], pts[j]));
    let mut a = LocalizedMatrix::new(ps.clone(), ps, m).unwrap();
    let env = build_envelope(&mut a, 0.25);
    assert!(a.envelope().unwrap().verified);
    for (edge, v) in env.edges().iter().zip(env.values()) {
        assert!(*v <= (-PI * edge * edge / 2.0).exp() * (1.0 + 1e-12), "bin at {edge}: {v}");
    }
}

#[test]
fn diagonal_envelope_is_delta() {
    let ps = lattice(1.0, 3.0);
    let n = ps.len();
    let m = Mat::<c64>::from_fn(n, n, |i, j| if i == j { c64::new(0.5 + i as f64 / n as f64, 0.0) } else { c64::new(0.0, 0.0) });
    let mut a = LocalizedMatrix::new(ps.clone(), ps, m).unwrap();
    let env = build_envelope(&mut a, 0.5);
    assert_eq!(env.values().len(), 1);
    assert!(env.eval(0.5).abs() == 0.0);
}

#[test]
fn amalgam_norm_ordering_on_gaussians_and_exponentials() {
    let spec = GroupSpec::abelian(2);
    let grid = AmalgamGrid { pitch: 0.25, extent: 24.0 };
    for (k, f) in [
        EnvelopeFunction::from_fn(|r| (-PI * r * r / 2.0).exp(), 0.125, 8.0),
        EnvelopeFunction::from_fn(|r| (-1.5 * r).exp(), 0.125, 24.0),
    ]
    .iter()
    .enumerate()
    {
        let r = amalgam_norms(f, &spec, 3.0, grid).unwrap();
        assert!(r.converged, "{k}");
        assert!(r.w_strong >= r.w_left.max(r.w_right));
        assert!(r.w_left.min(r.w_right) >= r.l1);
    }
    let slow = EnvelopeFunction::from_fn(|r| 1.0 / (1.0 + r), 0.25, 64.0);
    assert!(!amalgam_norms(&slow, &spec, 0.0, AmalgamGrid { pitch: 0.5, extent: 32.0 }).unwrap().converged);
}

/// `||F1 * F2||_{W^st} <= ||F1||_{W_R} ||F2||_W` on the plane with the max norm.
#[test]
fn convolution_containment() {
    let spec = GroupSpec::abelian(2);
    let pitch = 0.25;
    let half = 32i64; // grid cells cover [-8, 8]^2
    let cells = (2 * half) as usize;
    let center = |k: usize| (k as f64 - half as f64 + 0.5) * pitch;
    let profiles: [(&str, Box<dyn Fn(f64) -> f64>); 3] = [
        ("gauss", Box::new(|r: f64| (-PI * r * r).exp())),
        ("exp", Box::new(|r: f64| (-2.5 * r).exp())),
        ("wide", Box::new(|r: f64| (-0.8 * r * r).exp())),
    ];
    for (n1, f1) in &profiles {
        for (n2, f2) in &profiles {
            let sample = |f: &dyn Fn(f64) -> f64| {
                (0..cells * cells)
                    .map(|k| f(center(k / cells).abs().max(center(k % cells).abs())))
                    .collect::<Vec<_>>()
            };
            let (a, b) = (sample(f1.as_ref()), sample(f2.as_ref()));
            // discrete convolution on the doubled index range
            let big = 2 * cells;
            let mut conv = vec![0.0; big * big];
            for i in 0..cells * cells {
                if a[i] < 1e-14 {
                    continue;
                }
                let (ix, iy) = (i / cells, i % cells);
                for j in 0..cells * cells {
                    let (jx, jy) = (j / cells, j % cells);
                    conv[(ix + jx) * big + iy + jy] += a[i] * b[j] * pitch * pitch;
                }
            }
            // strong control: sup over the closed ball of radius 2 (u + v with u, v in B_1)
            let reach = (2.0 / pitch) as i64;
            let mut lhs = 0.0;
            for x in 0..big as i64 {
                for y in 0..big as i64 {
                    let mut m: f64 = 0.0;
                    for dx in -reach..=reach {
                        for dy in -reach..=reach {
                            let (u, v) = (x + dx, y + dy);
                            if u >= 0 && v >= 0 && (u as usize) < big && (v as usize) < big {
                                m = m.max(conv[u as usize * big + v as usize]);
                            }
                        }
                    }
                    lhs += m * pitch * pitch;
                }
            }
            let grid = AmalgamGrid { pitch, extent: 16.0 };
            let e1 = EnvelopeFunction::from_fn(|r| f1(r), 0.0625, 16.0);
            let e2 = EnvelopeFunction::from_fn(|r| f2(r), 0.0625, 16.0);
            let rhs = amalgam_norms(&e1, &spec, 0.0, grid).unwrap().w_right * amalgam_norms(&e2, &spec, 0.0, grid).unwrap().w_left;
            assert!(lhs <= rhs, "{n1} * {n2}: {lhs} > {rhs}");
        }
    }
}

#[test]
fn envelope_product_on_gaussians() {
    let gamma = lattice(1.0, 10.0);
    let f1 = EnvelopeFunction::from_fn(|r| (-PI * r * r).exp(), 0.125, 5.0);
    let f2 = EnvelopeFunction::from_fn(|r| (-2.0 * r).exp(), 0.125, 6.0);
    let p = envelope_product(&f1, &f2, &gamma, ProductOptions::default()).unwrap();
    assert!(p.holds && p.converged, "{p:?}");
    assert!(p.measured_constant <= p.constant);
    // at the first sample cell x = (p/2, p/2), H is at least the y = 0 term of its supremum
    let x = [0.125, 0.125];
    let direct: f64 = coords2(&gamma)
        .iter()
        .map(|g| {
            let r1 = g[0].abs().max(g[1].abs());
            let r2 = (x[0] - g[0]).abs().max((x[1] - g[1]).abs());
            f1.eval(r1) * f2.eval(r2)
        })
        .sum();
    assert!(p.h.eval(0.125) >= direct * (1.0 - 1e-12), "{} < {direct}", p.h.eval(0.125));
    let zero = envelope_product(&f1, &EnvelopeFunction::zero(), &gamma, ProductOptions::default()).unwrap();
    assert_eq!(zero.h_norm, 0.0);
}

#[test]
fn partition_of_unity_plane_and_heisenberg() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (spec, extent, samples) in [(GroupSpec::abelian(2), 6.0, 10_000), (GroupSpec::heisenberg(1), 3.0, 2_000)] {
        let pu = partition_of_unity(Arc::new(spec.clone()), extent).unwrap();
        assert!(separation(pu.centers()).unwrap() >= 1.0);
        let bound = pu.overlap_bound(2.0);
        let n = spec.dim();
        for _ in 0..samples {
            let x: Vec<f64> = loop {
                let x: Vec<f64> = spec.weights().iter().map(|&w| rng.random_range(-1.0..1.0) * extent.powi(w as i32)).collect();
                if spec.hnorm(&HomogeneousNorm::WeightedMax, &x) < extent {
                    break x;
                }
            };
            let vals = pu.eval(&x);
            let total: f64 = vals.iter().map(|p| p.1).sum();
            assert!((total - 1.0).abs() < 1e-10);
            for (k, _) in vals {
                let c = pu.centers().points()[k].coords();
                assert!(spec.distance(&HomogeneousNorm::WeightedMax, c, &x) < 2.0);
            }
            assert!(pu.overlap_count(&x, 2.0) as f64 <= bound);
            assert_eq!(x.len(), n);
        }
    }
}

fn gaussian_block(rows: &PointSet, cols: &PointSet) -> Mat<c64> {
    let (r, c) = (coords2(rows), coords2(cols));
    Mat::<c64>::from_fn(r.len(), c.len(), |i, j| gaussian_gram_entry(c[j], r[i]))
}

fn smallest_singular(m: &Mat<c64>) -> f64 {
    singular_values(m.as_ref()).unwrap().into_iter().fold(f64::INFINITY, f64::min)
}

#[test]
fn lift_with_identity_and_zero_projector() {
    let gamma = lattice(1.0, 3.0);
    let lam = lattice(0.8, 3.0);
    let a = LocalizedMatrix::new(lam.clone(), gamma.clone(), gaussian_block(&lam, &gamma)).unwrap();
    let n = gamma.len();

    let id = LocalizedMatrix::identity(gamma.clone());
    let lifted = lift_idempotent(&a, &id).unwrap();
    assert!(lifted.envelope_dominates);
    let s_b = smallest_singular(lifted.matrix.entries());
    let s_a = smallest_singular(a.entries());
    assert!((s_b - s_a).abs() < 1e-10 * s_a.max(1e-300), "{s_b} vs {s_a}");
    assert!(lifted.residual_projector.norm_max() == 0.0);

    let zero = LocalizedMatrix::new(gamma.clone(), gamma.clone(), Mat::zeros(n, n)).unwrap();
    let lifted = lift_idempotent(&a, &zero).unwrap();
    assert!((smallest_singular(lifted.matrix.entries()) - 1.0).abs() < 1e-12);
    let check = lifted.verify_lower_bound_transfer(50, 3).unwrap();
    assert_eq!(check.forward_violations + check.backward_violations, 0);
}

#[test]
fn lift_block_structure_and_transfer_for_gram_projector() {
    let gamma = lattice(0.5, 2.5);
    let lam = PointSet::explicit(
        plane(),
        HomogeneousNorm::WeightedMax,
        coords2(&lattice(0.7, 3.0)).iter().map(|p| vec![p[0] + 0.1, p[1] - 0.2]).collect(),
        3.0,
    )
    .unwrap();
    let g = gaussian_block(&gamma, &gamma);
    let (vals, vecs) = hermitian_eigen(g.as_ref()).unwrap();
    let top = vals.last().copied().unwrap();
    let keep: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > 1e-3 * top).collect();
    assert!(keep.len() < vals.len(), "projector should be rank deficient");
    let u = Mat::<c64>::from_fn(vals.len(), keep.len(), |i, k| vecs[(i, keep[k])]);
    let p_mat = &u * u.adjoint();
    let p = LocalizedMatrix::new(gamma.clone(), gamma.clone(), p_mat.clone()).unwrap();
    let a = LocalizedMatrix::new(lam.clone(), gamma.clone(), gaussian_block(&lam, &gamma)).unwrap();
    let lifted = lift_idempotent(&a, &p).unwrap();
    assert!(lifted.envelope_dominates);

    // locate every lifted row by its coordinates and compare with the two blocks
    let ap = a.entries() * &p_mat;
    let rows = lifted.matrix.rows();
    let cols = lifted.matrix.cols();
    let find = |set: &PointSet, c: &[f64]| set.points().iter().position(|q| q.coords() == c).unwrap();
    let gpts = coords2(&gamma);
    let lpts = coords2(&lam);
    for (i, l) in lpts.iter().enumerate() {
        let r = find(rows, &[l[0], l[1], 0.0]);
        for (j, gp) in gpts.iter().enumerate() {
            let c = find(cols, &[gp[0], gp[1], 1.0]);
            assert_eq!(lifted.matrix.entries()[(r, c)], ap[(i, j)]);
        }
    }
    for (i, gi) in gpts.iter().enumerate() {
        let r = find(rows, &[gi[0], gi[1], 1.0]);
        for (j, gj) in gpts.iter().enumerate() {
            let c = find(cols, &[gj[0], gj[1], 1.0]);
            let want = if i == j { c64::new(1.0, 0.0) - p_mat[(i, j)] } else { -p_mat[(i, j)] };
            assert!((lifted.matrix.entries()[(r, c)] - want).norm() < 1e-15);
        }
    }
    let check = lifted.verify_lower_bound_transfer(200, 5).unwrap();
    assert_eq!(check.forward_violations, 0, "{check:?}");
    assert_eq!(check.backward_violations, 0, "{check:?}");
    assert!(check.c_ap > 0.0 && check.beta_b > 0.0);
}

#[test]
fn non_idempotent_input_rejected() {
    let gamma = lattice(1.0, 2.0);
    let n = gamma.len();
    let p = LocalizedMatrix::new(gamma.clone(), gamma.clone(), Mat::from_fn(n, n, |i, j| if i == j { c64::new(0.5, 0.0) } else { c64::new(0.0, 0.0) })).unwrap();
    let a = LocalizedMatrix::identity(gamma);
    assert!(lift_idempotent(&a, &p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn schur_algebra_properties(seed in any::<u64>(), decay in 0.3f64..2.0, alpha in prop_oneof![Just(0.0), Just(1.0), Just(3.0)]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = lattice(1.0, 3.0);
        let y = lattice(0.8, 2.5);
        let z = lattice(1.2, 3.5);
        let a = random_localized(&x, &y, decay, &mut rng);
        let b = random_localized(&y, &z, decay, &mut rng);
        let na = schur_norm(&a, alpha).norm;
        prop_assert_eq!(schur_norm(&a.adjoint(), alpha).norm, na);
        let nab = schur_norm(&a.matmul(&b).unwrap(), alpha).norm;
        prop_assert!(nab <= na * schur_norm(&b, alpha).norm * (1.0 + 1e-12));
        prop_assert!(schur_norm(&a, 0.0).norm >= a.operator_norm_estimate(50) * (1.0 - 1e-12));
    }

    #[test]
    fn build_envelope_is_tight_at_largest_entry(seed in any::<u64>(), bin in 0.1f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = lattice(1.0, 3.0);
        let mut a = random_localized(&x, &x, 1.0, &mut rng);
        let env = build_envelope(&mut a, bin);
        prop_assert!(a.envelope().unwrap().verified);
        let mut best = (0.0, 0.0);
        for i in 0..a.rows().len() {
            for j in 0..a.cols().len() {
                let v = a.entries()[(i, j)].norm();
                prop_assert!(v <= env.eval(a.distance(i, j)) + 1e-12);
                if v > best.0 {
                    best = (v, env.eval(a.distance(i, j)));
                }
            }
        }
        prop_assert_eq!(best.0 / best.1, 1.0);
    }

    #[test]
    fn strong_amalgam_dominates(rate in 0.5f64..4.0, gaussian in any::<bool>(), alpha in 0.0f64..4.0) {
        let f = if gaussian {
            EnvelopeFunction::from_fn(|r| (-rate * r * r).exp(), 0.125, 8.0)
        } else {
            EnvelopeFunction::from_fn(|r| (-rate * r).exp(), 0.125, 16.0)
        };
        let r = amalgam_norms(&f, &GroupSpec::abelian(2), alpha, AmalgamGrid { pitch: 0.5, extent: 20.0 }).unwrap();
        prop_assert!(r.w_strong >= r.w_left.max(r.w_right));
    }
}
