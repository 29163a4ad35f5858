//! Smooth partitions of unity subordinate to a maximal 1-separated family.

use std::sync::Arc;

use super::envelope::eta;
use crate::error::{Error, Result};
use crate::group::{GroupSpec, HomogeneousNorm};
use crate::pointset::PointSet;

/// `ψ_k(x) = φ(|x_k^{-1} x|) / sum_j φ(|x_j^{-1} x|)` with the bump `φ = η`, so that
/// `supp ψ_k ⊂ B_2(x_k)`.
#[derive(Clone, Debug)]
pub struct PartitionOfUnity {
    centers: PointSet,
    extent: f64,
}

/// Greedy maximal family of points at mutual distance at least 1 (disjoint balls of
/// radius 1/2) among the grid points of `B_{extent+1}(e)`, scanned in the order of the
/// first weight-one coordinate.
pub fn partition_of_unity(spec: Arc<GroupSpec>, extent: f64) -> Result<PartitionOfUnity> {
    if !(extent > 2.0) || !extent.is_finite() {
        return Err(Error::InvalidArgument(format!("partition extent must exceed 2, got {extent}")));
    }
    let norm = HomogeneousNorm::WeightedMax;
    let n = spec.dim();
    let a = spec.sort_axis().ok_or_else(|| Error::InvalidArgument("trivial group".into()))?;
    let outer = extent + 1.0;
    let pitch: f64 = 0.25;
    let steps: Vec<f64> = spec.weights().iter().map(|&w| pitch.powi(w as i32)).collect();
    let half: Vec<i64> = spec
        .weights()
        .iter()
        .zip(&steps)
        .map(|(&w, s)| (outer.powi(w as i32) / s).floor() as i64)
        .collect();
    // enumerate with the sort axis outermost so that accepted centers come out sorted
    let mut order: Vec<usize> = (0..n).collect();
    order.retain(|&i| i != a);
    order.insert(0, a);
    let mut k: Vec<i64> = half.iter().map(|h| -h).collect();
    let mut centers: Vec<Vec<f64>> = Vec::new();
    let mut x = vec![0.0; n];
    let mut buf = vec![0.0; n];
    'outer: loop {
        for i in 0..n {
            x[i] = k[i] as f64 * steps[i];
        }
        if norm.eval(&spec, &x) < outer {
            let mut ok = true;
            for c in centers.iter().rev() {
                if x[a] - c[a] >= 1.0 {
                    break;
                }
                spec.left_quotient_into(c, &x, &mut buf);
                if norm.eval(&spec, &buf) < 1.0 {
                    ok = false;
                    break;
                }
            }
            if ok {
                centers.push(x.clone());
            }
        }
        for &d in order.iter().rev() {
            k[d] += 1;
            if k[d] <= half[d] {
                continue 'outer;
            }
            k[d] = -half[d];
        }
        break;
    }
    let centers = PointSet::explicit(spec, norm, centers, outer + 1.0)?;
    Ok(PartitionOfUnity { centers, extent })
}

impl PartitionOfUnity {
    pub fn centers(&self) -> &PointSet {
        &self.centers
    }

    /// Radius of the region where `sum ψ_k = 1` is guaranteed.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Nonzero values `(k, ψ_k(x))`.
    pub fn eval(&self, x: &[f64]) -> Vec<(usize, f64)> {
        let spec = self.centers.spec();
        let norm = self.centers.norm();
        let near: Vec<(usize, f64)> = self
            .centers
            .ball_indices(x, 2.0)
            .into_iter()
            .map(|k| (k, eta(spec.distance(norm, self.centers.points()[k].coords(), x))))
            .filter(|(_, v)| *v > 0.0)
            .collect();
        let total: f64 = near.iter().map(|p| p.1).sum();
        if total == 0.0 {
            return Vec::new();
        }
        near.into_iter().map(|(k, v)| (k, v / total)).collect()
    }

    /// `sum_k ψ_k(x)`.
    pub fn sum(&self, x: &[f64]) -> f64 {
        self.eval(x).iter().map(|p| p.1).sum()
    }

    /// `ψ_k(D_ε x)`, the rescaled family.
    pub fn eval_scaled(&self, x: &[f64], eps: f64) -> Result<Vec<(usize, f64)>> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidArgument(format!("scale must lie in (0, 1], got {eps}")));
        }
        let mut y = x.to_vec();
        self.centers.spec().dilate_in_place(&mut y, eps)?;
        Ok(self.eval(&y))
    }

    /// Number of centers `x_k` with `|x_k^{-1} x| < c_b`.
    pub fn overlap_count(&self, x: &[f64], c_b: f64) -> usize {
        self.centers.count_in_ball(x, c_b)
    }

    /// `ceil((4 C_b)^Q)`.
    pub fn overlap_bound(&self, c_b: f64) -> f64 {
        (4.0 * c_b).powf(self.centers.spec().homogeneous_dimension()).ceil()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::separation;

    #[test]
    fn plane_partition() {
        let pu = partition_of_unity(Arc::new(GroupSpec::abelian(2)), 4.0).unwrap();
        assert!(separation(pu.centers()).unwrap() >= 1.0);
        for x in [[0.0, 0.0], [1.3, -2.7], [3.9, 3.9]] {
            assert!((pu.sum(&x) - 1.0).abs() < 1e-12);
        }
        assert!(partition_of_unity(Arc::new(GroupSpec::abelian(2)), 2.0).is_err());
    }
}
