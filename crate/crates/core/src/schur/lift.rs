//! Lift of `c -> (APc, (I-P)c)` to a single localized matrix on `G x R`.

use std::sync::Arc;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::envelope::{eta, EnvelopeFunction};
use super::{build_envelope, LocalizedMatrix};
use crate::c64;
use crate::error::{Error, Result};
use crate::linalg::{self, lp_norm, matvec};
use crate::pointset::PointSet;

/// The lifted matrix `B` with rows `Λ x {0} ∪ Γ x {1}` and columns `Γ x {1}`.
#[derive(Clone, Debug)]
pub struct LiftedMatrix {
    pub matrix: LocalizedMatrix,
    /// `AP` and `I - P` as plain blocks.
    pub ap: Mat<c64>,
    pub residual_projector: Mat<c64>,
    pub p: Mat<c64>,
    /// `Θ' = env(AP) + env(I - P)`; the lifted envelope is `Θ'(x) η(t)`.
    pub base_envelope: EnvelopeFunction,
    /// Every entry of `B` is dominated by the lifted envelope.
    pub envelope_dominates: bool,
}

/// Result of checking the two implications on random vectors (`p = 2`).
#[derive(Clone, Debug)]
pub struct LiftCheck {
    /// `inf ||APc|| / ||Pc||` over the range of `P`.
    pub c_ap: f64,
    /// Smallest singular value of `B`.
    pub beta_b: f64,
    pub samples: usize,
    /// Violations of `||APc|| + ||(I-P)c|| >= min(C, 1) ||c||`.
    pub forward_violations: usize,
    /// Violations of `||APc|| >= β_B ||Pc||`.
    pub backward_violations: usize,
    pub worst_forward_margin: f64,
    pub worst_backward_margin: f64,
}

fn lift_points(ps: &PointSet, t: f64) -> Vec<Vec<f64>> {
    ps.points()
        .iter()
        .map(|p| {
            let mut v = p.coords().to_vec();
            v.push(t);
            v
        })
        .collect()
}

/// Builds `B`. `a` is indexed by `Λ x Γ`, `p` by `Γ x Γ`; `p` must be idempotent.
pub fn lift_idempotent(a: &LocalizedMatrix, p: &LocalizedMatrix) -> Result<LiftedMatrix> {
    let g = p.entries().nrows();
    if p.entries().ncols() != g || a.entries().ncols() != g {
        return Err(Error::DimensionMismatch { expected: g, got: a.entries().ncols() });
    }
    let pe = p.entries();
    let p2 = pe * pe;
    let scale = linalg::max_abs(pe.as_ref()).max(1.0);
    let resid = linalg::max_abs((&p2 - pe).as_ref());
    if resid > 1e-8 * scale {
        return Err(Error::NotIdempotent(resid));
    }
    let ap = a.entries() * pe;
    let ip = Mat::<c64>::identity(g, g) - pe;
    let l = ap.nrows();

    let base = a.rows().spec_arc().clone();
    let lifted_spec = Arc::new(base.product_with_line());
    let window = a.rows().window_radius().max(p.rows().window_radius()) + 2.0;
    let mut row_pts = lift_points(a.rows(), 0.0);
    row_pts.extend(lift_points(p.rows(), 1.0));
    let col_pts = lift_points(p.cols(), 1.0);
    let norm = *a.rows().norm();
    let rows = PointSet::explicit(lifted_spec.clone(), norm, row_pts.clone(), window)?;
    let cols = PointSet::explicit(lifted_spec.clone(), norm, col_pts.clone(), window)?;
    if rows.len() != l + g || cols.len() != g {
        return Err(Error::InvalidArgument("lifted index sets must not contain duplicates".into()));
    }
    // explicit sets are stored sorted; map the block layout onto that order
    let row_pos: Vec<usize> = row_pts.iter().map(|v| position(&rows, v)).collect();
    let col_pos: Vec<usize> = col_pts.iter().map(|v| position(&cols, v)).collect();
    let mut entries = Mat::<c64>::zeros(l + g, g);
    for j in 0..g {
        for i in 0..l {
            entries[(row_pos[i], col_pos[j])] = ap[(i, j)];
        }
        for i in 0..g {
            entries[(row_pos[l + i], col_pos[j])] = ip[(i, j)];
        }
    }
    let mut ap_loc = LocalizedMatrix::new(a.rows().clone(), p.cols().clone(), ap.clone())?;
    let mut ip_loc = LocalizedMatrix::new(p.rows().clone(), p.cols().clone(), ip.clone())?;
    let bin = 0.25;
    let theta = build_envelope(&mut ap_loc, bin).add(&build_envelope(&mut ip_loc, bin));
    let mut matrix = LocalizedMatrix::new(rows, cols, entries)?;
    let last = lifted_spec.dim() - 1;
    let dominates = (0..matrix.entries().nrows()).all(|i| {
        (0..g).all(|j| {
            let x = matrix.rows().points()[i].coords();
            let y = matrix.cols().points()[j].coords();
            let mut q = vec![0.0; lifted_spec.dim()];
            lifted_spec.left_quotient_into(x, y, &mut q);
            let t = q[last];
            let r = base.hnorm(&norm, &q[..last]);
            matrix.entries()[(i, j)].norm() <= theta.eval(r) * eta(t) + 1e-12
        })
    });
    matrix.envelope = None;
    Ok(LiftedMatrix {
        matrix,
        ap,
        residual_projector: ip,
        p: pe.clone(),
        base_envelope: theta,
        envelope_dominates: dominates,
    })
}

fn position(ps: &PointSet, v: &[f64]) -> usize {
    ps.points().iter().position(|p| p.coords() == v).expect("point present")
}

impl LiftedMatrix {
    /// Checks both directions of the lower-bound equivalence on `samples` random vectors.
    pub fn verify_lower_bound_transfer(&self, samples: usize, seed: u64) -> Result<LiftCheck> {
        let g = self.p.nrows();
        // orthonormal basis of the range of P from its singular vectors
        let svd = self.p.thin_svd().map_err(|_| Error::Eigen)?;
        let s = svd.S().column_vector();
        let top = (0..s.nrows()).map(|i| s[i].re).fold(0.0, f64::max);
        let rank = (0..s.nrows()).filter(|&i| s[i].re > 1e-8 * top.max(1e-300)).count();
        let c_ap = if rank == 0 {
            f64::INFINITY
        } else {
            let u = svd.U().subcols(0, rank).to_owned();
            let apu = &self.ap * &u;
            linalg::singular_values(apu.as_ref())?.last().copied().unwrap_or(0.0)
        };
        let beta_b = linalg::singular_values(self.matrix.entries().as_ref())?.last().copied().unwrap_or(0.0);
        let kappa = c_ap.min(1.0);

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut check = LiftCheck {
            c_ap,
            beta_b,
            samples,
            forward_violations: 0,
            backward_violations: 0,
            worst_forward_margin: f64::INFINITY,
            worst_backward_margin: f64::INFINITY,
        };
        for k in 0..samples {
            let mut c: Vec<c64> = (0..g)
                .map(|_| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            // alternate between generic vectors and vectors in the range of P
            if k % 2 == 1 {
                c = matvec(self.p.as_ref(), &c);
            }
            let nc = lp_norm(&c, 2.0);
            if nc == 0.0 {
                continue;
            }
            c.iter_mut().for_each(|z| *z /= nc);
            let apc = lp_norm(&matvec(self.ap.as_ref(), &c), 2.0);
            let ipc = lp_norm(&matvec(self.residual_projector.as_ref(), &c), 2.0);
            let pc = lp_norm(&matvec(self.p.as_ref(), &c), 2.0);
            let fwd = apc + ipc - kappa;
            let bwd = apc - beta_b * pc;
            check.worst_forward_margin = check.worst_forward_margin.min(fwd);
            check.worst_backward_margin = check.worst_backward_margin.min(bwd);
            if fwd < -1e-8 {
                check.forward_violations += 1;
            }
            if bwd < -1e-8 {
                check.backward_violations += 1;
            }
        }
        Ok(check)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    #[test]
    fn banded_projector_transfer() {
        let spec = Arc::new(GroupSpec::abelian(1));
        let gamma = PointSet::lattice(spec, vec![vec![1.0]], 6.0).unwrap();
        let n = gamma.len();
        // orthogonal projector onto a localized two-point average
        let mut p = Mat::<c64>::zeros(n, n);
        for k in (0..n - 1).step_by(2) {
            for (i, j) in [(k, k), (k, k + 1), (k + 1, k), (k + 1, k + 1)] {
                p[(i, j)] = c64::new(0.5, 0.0);
            }
        }
        let a = Mat::<c64>::from_fn(n, n, |i, j| {
            let d = (i as f64 - j as f64).abs();
            c64::new(if i == j { 2.0 } else { 0.3f64.powf(d) * 0.5 }, 0.0)
        });
        let a = LocalizedMatrix::new(gamma.clone(), gamma.clone(), a).unwrap();
        let p = LocalizedMatrix::new(gamma.clone(), gamma, p).unwrap();
        let lifted = lift_idempotent(&a, &p).unwrap();
        assert!(lifted.envelope_dominates);
        assert_eq!(lifted.matrix.entries().nrows(), 2 * n);
        let check = lifted.verify_lower_bound_transfer(64, 7).unwrap();
        assert!(check.c_ap > 0.5 && check.beta_b > 0.0);
        assert_eq!(check.forward_violations, 0);
        assert_eq!(check.backward_violations, 0);
    }

    #[test]
    fn non_idempotent_rejected() {
        let spec = Arc::new(GroupSpec::abelian(1));
        let gamma = PointSet::lattice(spec, vec![vec![1.0]], 3.0).unwrap();
        let n = gamma.len();
        let half = Mat::<c64>::from_fn(n, n, |i, j| c64::new(if i == j { 0.5 } else { 0.0 }, 0.0));
        let a = LocalizedMatrix::identity(gamma.clone());
        let p = LocalizedMatrix::new(gamma.clone(), gamma, half).unwrap();
        assert!(matches!(lift_idempotent(&a, &p), Err(Error::NotIdempotent(_))));
    }
}
