//! Control functions, amalgam norms and the envelope product bound.
//!
//! Envelopes are radial in the homogeneous norm. The control functions
//! `F#(x) = sup_{u ∈ B_1} F(xu)`, `F_#(x) = sup_{u ∈ B_1} F(ux)` and
//! `F#_#(x) = sup_{u,v ∈ B_1} F(uxv)` are evaluated on a cell-centered grid, with the
//! sup taken over a grid of the closed unit ball that is aligned with it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::envelope::EnvelopeFunction;
use crate::error::{Error, Result};
use crate::group::{GroupSpec, HomogeneousNorm};
use crate::pointset::{relative_separation, PointSet};

/// Discretization of the Riemann sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmalgamGrid {
    /// Pitch along weight-one axes; an axis of weight `w` uses `pitch^w`.
    pub pitch: f64,
    /// Integration over the ball of this radius.
    pub extent: f64,
}

impl Default for AmalgamGrid {
    fn default() -> Self {
        Self { pitch: 0.25, extent: 16.0 }
    }
}

/// Weighted `L^1` norms of an envelope and of its control functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmalgamReport {
    pub alpha: f64,
    pub l1: f64,
    /// `||F#||_{L^1_w}`.
    pub w_left: f64,
    /// `||F_#||_{L^1_w}`.
    pub w_right: f64,
    /// `||F#_#||_{L^1_w}`.
    pub w_strong: f64,
    /// Strong norm over the ball of half the extent, for the Cauchy test.
    pub w_strong_half: f64,
    /// Cauchy test: doubling the extent changes the strong norm by at most `1e-3` relative.
    pub converged: bool,
}

struct CellGrid {
    steps: Vec<f64>,
    half: Vec<i64>,
    sizes: Vec<usize>,
}

impl CellGrid {
    /// Cell centers `(k + 1/2) step_i` covering the box `|x_i| < extent^{w_i}`.
    fn new(spec: &GroupSpec, pitch: f64, extent: f64) -> Self {
        let steps: Vec<f64> = spec.weights().iter().map(|&w| pitch.powi(w as i32)).collect();
        let half: Vec<i64> = spec
            .weights()
            .iter()
            .zip(&steps)
            .map(|(&w, s)| (extent.powi(w as i32) / s).ceil() as i64)
            .collect();
        let sizes = half.iter().map(|h| (2 * h) as usize).collect();
        Self { steps, half, sizes }
    }

    fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    fn point(&self, mut flat: usize, out: &mut [f64]) {
        for a in (0..self.sizes.len()).rev() {
            let k = (flat % self.sizes[a]) as i64 - self.half[a];
            flat /= self.sizes[a];
            out[a] = (k as f64 + 0.5) * self.steps[a];
        }
    }

    fn index(&self, x: &[f64]) -> Option<usize> {
        let mut flat = 0usize;
        for a in 0..self.sizes.len() {
            let k = (x[a] / self.steps[a] - 0.5).round() as i64 + self.half[a];
            if k < 0 || k as usize >= self.sizes[a] {
                return None;
            }
            flat = flat * self.sizes[a] + k as usize;
        }
        Some(flat)
    }

    fn cell_volume(&self) -> f64 {
        self.steps.iter().product()
    }
}

/// Grid of the closed unit ball with points `k pitch^{w_i}`.
fn unit_ball_offsets(spec: &GroupSpec, norm: &HomogeneousNorm, pitch: f64) -> Vec<Vec<f64>> {
    let n = spec.dim();
    let steps: Vec<f64> = spec.weights().iter().map(|&w| pitch.powi(w as i32)).collect();
    let half: Vec<i64> = steps.iter().map(|s| (1.0 / s + 1e-9).floor() as i64).collect();
    let mut out = Vec::new();
    let mut k: Vec<i64> = half.iter().map(|h| -h).collect();
    let mut x = vec![0.0; n];
    loop {
        for a in 0..n {
            x[a] = k[a] as f64 * steps[a];
        }
        if norm.eval(spec, &x) <= 1.0 + 1e-12 {
            out.push(x.clone());
        }
        let mut d = 0;
        loop {
            if d == n {
                return out;
            }
            k[d] += 1;
            if k[d] > half[d] {
                k[d] = -half[d];
                d += 1;
            } else {
                break;
            }
        }
    }
}

/// Distances needed for the three control functions on the grid of `extent`.
struct ControlDistances {
    grid: CellGrid,
    /// `|x|`, `min_u |xu|`, `min_u |ux|`, `min_{u,v} |uxv|` per grid point.
    plain: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
    strong: Vec<f64>,
}

fn control_distances(spec: &GroupSpec, norm: &HomogeneousNorm, pitch: f64, extent: f64) -> ControlDistances {
    let n = spec.dim();
    let offsets = unit_ball_offsets(spec, norm, pitch);
    // the strong control function looks up the left one on a grid two units larger
    let outer = CellGrid::new(spec, pitch, extent + 2.0);
    let left_outer: Vec<f64> = (0..outer.len())
        .into_par_iter()
        .map(|flat| {
            let mut x = vec![0.0; n];
            let mut y = vec![0.0; n];
            outer.point(flat, &mut x);
            offsets
                .iter()
                .map(|u| {
                    spec.multiply_into(&x, u, &mut y);
                    norm.eval(spec, &y)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let grid = CellGrid::new(spec, pitch, extent);
    let rows: Vec<(f64, f64, f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let mut x = vec![0.0; n];
            let mut y = vec![0.0; n];
            grid.point(flat, &mut x);
            let plain = norm.eval(spec, &x);
            let oi = outer.index(&x).expect("inner grid lies in the outer grid");
            let left = left_outer[oi];
            let mut right = f64::INFINITY;
            let mut strong = f64::INFINITY;
            for v in &offsets {
                spec.multiply_into(v, &x, &mut y);
                right = right.min(norm.eval(spec, &y));
                let l = outer.index(&y).map_or_else(
                    || {
                        // outside the lookup grid: evaluate directly
                        let mut z = vec![0.0; n];
                        offsets
                            .iter()
                            .map(|u| {
                                spec.multiply_into(&y, u, &mut z);
                                norm.eval(spec, &z)
                            })
                            .fold(f64::INFINITY, f64::min)
                    },
                    |i| left_outer[i],
                );
                strong = strong.min(l);
            }
            (plain, left, right, strong)
        })
        .collect();
    let mut d = ControlDistances {
        grid,
        plain: Vec::with_capacity(rows.len()),
        left: Vec::with_capacity(rows.len()),
        right: Vec::with_capacity(rows.len()),
        strong: Vec::with_capacity(rows.len()),
    };
    for (p, l, r, s) in rows {
        d.plain.push(p);
        d.left.push(l);
        d.right.push(r);
        d.strong.push(s);
    }
    d
}

/// Weighted `L^1` norms of `F`, `F#`, `F_#` and `F#_#` for the radial envelope `f`
/// with weight `(1 + |x|)^α`.
pub fn amalgam_norms(f: &EnvelopeFunction, spec: &GroupSpec, alpha: f64, grid: AmalgamGrid) -> Result<AmalgamReport> {
    if !(grid.pitch > 0.0) || !(grid.extent > 0.0) {
        return Err(Error::InvalidArgument("amalgam grid needs positive pitch and extent".into()));
    }
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!("weight exponent must be nonnegative, got {alpha}")));
    }
    let norm = HomogeneousNorm::WeightedMax;
    let d = control_distances(spec, &norm, grid.pitch, grid.extent);
    let vol = d.grid.cell_volume();
    let mut sums = [0.0; 5];
    for i in 0..d.plain.len() {
        let r = d.plain[i];
        if r >= grid.extent {
            continue;
        }
        let w = (1.0 + r).powf(alpha) * vol;
        sums[0] += f.eval(r) * w;
        sums[1] += f.eval(d.left[i]) * w;
        sums[2] += f.eval(d.right[i]) * w;
        let s = f.eval(d.strong[i]) * w;
        sums[3] += s;
        if r < grid.extent / 2.0 {
            sums[4] += s;
        }
    }
    let converged = sums[3] - sums[4] <= 1e-3 * sums[3];
    Ok(AmalgamReport {
        alpha,
        l1: sums[0],
        w_left: sums[1],
        w_right: sums[2],
        w_strong: sums[3],
        w_strong_half: sums[4],
        converged,
    })
}

/// Options for [`envelope_product`].
#[derive(Clone, Copy, Debug)]
pub struct ProductOptions {
    pub alpha: f64,
    /// Grid of `x` values where `H` is sampled.
    pub pitch: f64,
    /// The sup over `y` runs over a grid of the closed ball of this radius.
    pub y_extent: f64,
    pub amalgam: AmalgamGrid,
    /// Quasi-triangle constant of the norm; measured when `None` on non-abelian groups.
    pub quasi_triangle: Option<f64>,
}

impl Default for ProductOptions {
    fn default() -> Self {
        Self { alpha: 0.0, pitch: 0.25, y_extent: 1.0, amalgam: AmalgamGrid::default(), quasi_triangle: None }
    }
}

/// `H(x) = sup_y sum_γ F1(γ^{-1} y) F2(γ^{-1} y x)` with its strong amalgam norm and
/// the bound `||H|| <= C ||F1|| ||F2||`, `C = rel(Γ) / μ(B_1) * C_q^α`.
#[derive(Clone, Debug)]
pub struct EnvelopeProduct {
    pub h: EnvelopeFunction,
    pub h_norm: f64,
    pub f1_norm: f64,
    pub f2_norm: f64,
    pub constant: f64,
    /// `h_norm / (f1_norm f2_norm)`.
    pub measured_constant: f64,
    pub holds: bool,
    pub converged: bool,
}

pub fn envelope_product(
    f1: &EnvelopeFunction,
    f2: &EnvelopeFunction,
    gamma: &PointSet,
    opts: ProductOptions,
) -> Result<EnvelopeProduct> {
    let spec = gamma.spec();
    let norm = *gamma.norm();
    if norm != HomogeneousNorm::WeightedMax {
        return Err(Error::InvalidArgument("envelope products use the weighted-max norm".into()));
    }
    let s1 = f1.support();
    let s2 = f2.support();
    let needed = opts.y_extent + s1;
    if gamma.window_radius() < needed {
        return Err(Error::WindowTooSmall { window: gamma.window_radius(), needed });
    }
    let n = spec.dim();
    let x_extent = s1 + s2;
    let xs = CellGrid::new(spec, opts.pitch, x_extent);
    let ys = unit_ball_offsets(spec, &norm, opts.pitch)
        .into_iter()
        .map(|mut u| {
            spec.dilate_in_place(&mut u, opts.y_extent).expect("positive extent");
            u
        })
        .collect::<Vec<_>>();
    // per y: the elements γ^{-1} y with F1 nonzero
    let shifted: Vec<Vec<Vec<f64>>> = ys
        .iter()
        .map(|y| {
            gamma
                .ball_indices(y, s1)
                .into_iter()
                .map(|i| {
                    let mut w = vec![0.0; n];
                    spec.left_quotient_into(gamma.points()[i].coords(), y, &mut w);
                    w
                })
                .collect()
        })
        .collect();
    let samples: Vec<(f64, f64)> = (0..xs.len())
        .into_par_iter()
        .map(|flat| {
            let mut x = vec![0.0; n];
            let mut z = vec![0.0; n];
            xs.point(flat, &mut x);
            let mut best: f64 = 0.0;
            for ws in &shifted {
                let mut acc = 0.0;
                for w in ws {
                    let a = f1.eval(norm.eval(spec, w));
                    if a == 0.0 {
                        continue;
                    }
                    spec.multiply_into(w, &x, &mut z);
                    acc += a * f2.eval(norm.eval(spec, &z));
                }
                best = best.max(acc);
            }
            (norm.eval(spec, &x), best)
        })
        .collect();
    let h = EnvelopeFunction::from_samples(samples, opts.pitch);

    let report = |f: &EnvelopeFunction| amalgam_norms(f, spec, opts.alpha, opts.amalgam);
    let rh = report(&h)?;
    let r1 = report(f1)?;
    let r2 = report(f2)?;
    let rel = relative_separation(gamma) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let unit = spec.ball_volume(&norm, 1.0, &mut rng, 1)?.value;
    let cq = match opts.quasi_triangle {
        Some(c) => c,
        None if spec.is_abelian() => 1.0,
        None => spec.quasi_triangle_constant(&norm, &mut rng, 20_000),
    };
    let constant = rel / unit * cq.powf(opts.alpha);
    let denom = r1.w_strong * r2.w_strong;
    let measured = if denom > 0.0 { rh.w_strong / denom } else { 0.0 };
    Ok(EnvelopeProduct {
        holds: rh.w_strong <= constant * denom * (1.0 + 1e-12),
        converged: rh.converged && r1.converged && r2.converged,
        h,
        h_norm: rh.w_strong,
        f1_norm: r1.w_strong,
        f2_norm: r2.w_strong,
        constant,
        measured_constant: measured,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indicator() -> EnvelopeFunction {
        EnvelopeFunction::new(vec![0.0, 1.0], vec![1.0]).unwrap()
    }

    #[test]
    fn indicator_of_unit_ball() {
        let r = amalgam_norms(&indicator(), &GroupSpec::abelian(2), 0.0, AmalgamGrid { pitch: 0.25, extent: 8.0 }).unwrap();
        assert!((r.l1 - 4.0).abs() < 1e-12);
        assert!((r.w_left - 16.0).abs() < 1e-12);
        assert!((r.w_right - 16.0).abs() < 1e-12);
        assert!((r.w_strong - 36.0).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn slowly_decaying_profile_flags_divergence() {
        let f = EnvelopeFunction::from_fn(|r| 1.0 / (1.0 + r), 0.25, 64.0);
        let r = amalgam_norms(&f, &GroupSpec::abelian(2), 0.0, AmalgamGrid { pitch: 0.5, extent: 32.0 }).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn exponential_profile_ordering() {
        let f = EnvelopeFunction::from_fn(|r| (-r).exp(), 0.125, 40.0);
        let r = amalgam_norms(&f, &GroupSpec::abelian(2), 1.0, AmalgamGrid { pitch: 0.25, extent: 40.0 }).unwrap();
        assert!(r.converged);
        assert!(r.w_strong >= r.w_left.max(r.w_right));
        assert!(r.w_left >= r.l1);
    }

    #[test]
    fn zero_factor_gives_zero_product() {
        let spec = std::sync::Arc::new(GroupSpec::abelian(2));
        let gamma = PointSet::lattice(spec, vec![vec![1.0, 0.0], vec![0.0, 1.0]], 8.0).unwrap();
        let p = envelope_product(&indicator(), &EnvelopeFunction::zero(), &gamma, ProductOptions::default()).unwrap();
        assert!(p.h.values().is_empty());
        assert_eq!(p.h_norm, 0.0);
        assert!(p.holds);
    }
}
