//! Discrete subsets of a homogeneous group and their density statistics.
//!
//! A [`PointSet`] is always a finite truncation `Λ ∩ B_{R_max}(e)`. Balls are open
//! throughout: `B_R(x) = { y : |x^{-1} y| < R }`. Distances are compared with a
//! relative slack of `1e-10` so that points sitting exactly on a sphere are
//! classified the same way regardless of rounding.

use std::cmp::Ordering;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec, HomogeneousNorm};
use crate::linalg::invert_small;

const BALL_SLACK: f64 = 1e-10;

#[inline]
pub(crate) fn inside(d: f64, r: f64) -> bool {
    d < r * (1.0 - BALL_SLACK)
}

/// How a point set was produced.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// Points `B k`, `k` integer, where `basis[j]` is the `j`-th column of `B`.
    Lattice { basis: Vec<Vec<f64>> },
    /// Points `B k` tiling the group with a coordinate box of side lengths `complement`.
    QuasiLattice { basis: Vec<Vec<f64>>, complement: Vec<f64> },
    Explicit,
    /// Every base point multiplied on the right by a random element of `B_jitter(e)`.
    Perturbed { base: Box<Generator>, jitter: f64, seed: u64 },
}

/// A finite truncation of a discrete subset of `G`.
#[derive(Clone, Debug)]
pub struct PointSet {
    spec: Arc<GroupSpec>,
    norm: HomogeneousNorm,
    points: Vec<GroupElement>,
    axis: Vec<f64>,
    window_radius: f64,
    generator: Generator,
}

fn check_window(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("window radius must be positive, got {r}")));
    }
    Ok(())
}

/// All integer combinations `B k` with `|B k| < radius`.
fn enumerate_lattice(spec: &GroupSpec, norm: &HomogeneousNorm, basis: &[Vec<f64>], radius: f64) -> Result<Vec<Vec<f64>>> {
    let n = spec.dim();
    if basis.len() != n || basis.iter().any(|b| b.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: basis.len() });
    }
    if n == 0 {
        return Ok(vec![Vec::new()]);
    }
    // matrix with the basis vectors as columns
    let b: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| basis[j][i]).collect()).collect();
    let inv = invert_small(&b)?;
    // |x_i| < radius^{w_i} on the ball, so |k_j| <= sum_i |inv_ji| radius^{w_i}
    let bounds: Vec<i64> = (0..n)
        .map(|j| {
            let s: f64 = (0..n).map(|i| inv[j][i].abs() * radius.powi(spec.weights()[i] as i32)).sum();
            s.floor() as i64 + 1
        })
        .collect();
    let mut k: Vec<i64> = bounds.iter().map(|b| -b).collect();
    let mut out = Vec::new();
    let mut x = vec![0.0; n];
    loop {
        for i in 0..n {
            x[i] = (0..n).map(|j| b[i][j] * k[j] as f64).sum();
        }
        if inside(norm.eval(spec, &x), radius) {
            out.push(x.clone());
        }
        let mut d = 0;
        loop {
            if d == n {
                return Ok(out);
            }
            k[d] += 1;
            if k[d] > bounds[d] {
                k[d] = -bounds[d];
                d += 1;
            } else {
                break;
            }
        }
    }
}

fn det_small(basis: &[Vec<f64>]) -> f64 {
    let n = basis.len();
    let mut m: Vec<Vec<f64>> = basis.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs())).expect("nonempty");
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in (c + 1)..n {
            let f = m[r][c] / m[c][c];
            let pivot = m[c].clone();
            for (x, y) in m[r].iter_mut().zip(&pivot) {
                *x -= f * y;
            }
        }
    }
    det
}

impl PointSet {
    fn from_points(
        spec: Arc<GroupSpec>,
        norm: HomogeneousNorm,
        mut pts: Vec<Vec<f64>>,
        window_radius: f64,
        generator: Generator,
    ) -> Result<Self> {
        check_window(window_radius)?;
        let n = spec.dim();
        for p in &pts {
            if p.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("non-finite point coordinate".into()));
            }
        }
        pts.retain(|p| inside(norm.eval(&spec, p), window_radius));
        let a = spec.sort_axis().unwrap_or(0);
        pts.sort_by(|x, y| {
            let head = if n > 0 { x[a].total_cmp(&y[a]) } else { Ordering::Equal };
            head.then_with(|| {
                x.iter()
                    .zip(y.iter())
                    .map(|(u, v)| u.total_cmp(v))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            })
        });
        pts.dedup();
        let axis = pts.iter().map(|p| if n > 0 { p[a] } else { 0.0 }).collect();
        Ok(Self {
            spec,
            norm,
            points: pts.into_iter().map(GroupElement::new).collect(),
            axis,
            window_radius,
            generator,
        })
    }

    /// Points `B k` inside the window, weighted-max norm.
    pub fn lattice(spec: Arc<GroupSpec>, basis: Vec<Vec<f64>>, window_radius: f64) -> Result<Self> {
        Self::generate(spec, HomogeneousNorm::WeightedMax, Generator::Lattice { basis }, window_radius)
    }

    /// Builds the truncation of a generated set.
    pub fn generate(
        spec: Arc<GroupSpec>,
        norm: HomogeneousNorm,
        generator: Generator,
        window_radius: f64,
    ) -> Result<Self> {
        check_window(window_radius)?;
        let pts = Self::raw_points(&spec, &norm, &generator, window_radius)?;
        Self::from_points(spec, norm, pts, window_radius, generator)
    }

    fn raw_points(
        spec: &GroupSpec,
        norm: &HomogeneousNorm,
        generator: &Generator,
        window_radius: f64,
    ) -> Result<Vec<Vec<f64>>> {
        match generator {
            Generator::Lattice { basis } => enumerate_lattice(spec, norm, basis, window_radius),
            Generator::QuasiLattice { basis, complement } => {
                if complement.len() != spec.dim() || complement.iter().any(|c| !(*c > 0.0)) {
                    return Err(Error::InvalidArgument("complement box must have positive sides".into()));
                }
                enumerate_lattice(spec, norm, basis, window_radius)
            }
            Generator::Explicit => Err(Error::InvalidArgument(
                "explicit point sets are built with PointSet::explicit".into(),
            )),
            Generator::Perturbed { base, jitter, seed } => {
                if !(*jitter >= 0.0) {
                    return Err(Error::InvalidArgument("jitter must be nonnegative".into()));
                }
                let mut pts = Self::raw_points(spec, norm, base, window_radius + 2.0 * jitter + 1.0)?;
                pts.sort_by(|x, y| {
                    x.iter()
                        .zip(y.iter())
                        .map(|(u, v)| u.total_cmp(v))
                        .find(|o| *o != Ordering::Equal)
                        .unwrap_or(Ordering::Equal)
                });
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let n = spec.dim();
                let mut delta = vec![0.0; n];
                let mut out = vec![0.0; n];
                for p in pts.iter_mut() {
                    // rejection sampling from the cube containing B_jitter
                    loop {
                        for (d, &w) in delta.iter_mut().zip(spec.weights()) {
                            let s = jitter.powi(w as i32);
                            *d = if s > 0.0 { rng.random_range(-s..s) } else { 0.0 };
                        }
                        if *jitter == 0.0 || inside(norm.eval(spec, &delta), *jitter) {
                            break;
                        }
                    }
                    spec.multiply_into(p, &delta, &mut out);
                    p.copy_from_slice(&out);
                }
                Ok(pts)
            }
        }
    }

    /// An explicit list of points; points outside the window are dropped.
    pub fn explicit(spec: Arc<GroupSpec>, norm: HomogeneousNorm, points: Vec<Vec<f64>>, window_radius: f64) -> Result<Self> {
        Self::from_points(spec, norm, points, window_radius, Generator::Explicit)
    }

    /// Union of two sets over the same group, truncated at the smaller window.
    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        if self.spec.dim() != other.spec.dim() {
            return Err(Error::DimensionMismatch { expected: self.spec.dim(), got: other.spec.dim() });
        }
        let pts = self.points.iter().chain(&other.points).map(|p| p.coords().to_vec()).collect();
        Self::explicit(self.spec.clone(), self.norm, pts, self.window_radius.min(other.window_radius))
    }

    /// The subset inside the smaller window `B_radius(e)`.
    pub fn restrict(&self, radius: f64) -> Result<PointSet> {
        check_window(radius)?;
        let pts = self.points.iter().map(|p| p.coords().to_vec()).collect();
        Self::from_points(self.spec.clone(), self.norm, pts, radius.min(self.window_radius), self.generator.clone())
    }

    /// Regenerates the same set with a larger (or smaller) window.
    pub fn with_window(&self, radius: f64) -> Result<PointSet> {
        match self.generator {
            Generator::Explicit => self.restrict(radius),
            _ => Self::generate(self.spec.clone(), self.norm, self.generator.clone(), radius),
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn spec_arc(&self) -> &Arc<GroupSpec> {
        &self.spec
    }

    pub fn norm(&self) -> &HomogeneousNorm {
        &self.norm
    }

    pub fn points(&self) -> &[GroupElement] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// `1 / |det B|` for lattices, `1 / vol(complement)` for quasi-lattices.
    pub fn expected_density(&self) -> Option<f64> {
        match &self.generator {
            Generator::Lattice { basis } => Some(1.0 / det_small(basis).abs()),
            Generator::QuasiLattice { complement, .. } => Some(1.0 / complement.iter().product::<f64>()),
            Generator::Perturbed { base, .. } => match base.as_ref() {
                Generator::Lattice { basis } => Some(1.0 / det_small(basis).abs()),
                Generator::QuasiLattice { complement, .. } => Some(1.0 / complement.iter().product::<f64>()),
                _ => None,
            },
            Generator::Explicit => None,
        }
    }

    /// Index range of points whose sort-axis coordinate lies in `(lo, hi)`.
    fn slab(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let start = self.axis.partition_point(|&v| v <= lo);
        let end = self.axis.partition_point(|&v| v < hi);
        start..end.max(start)
    }

    /// Indices of the points in the open ball `B_r(center)` (left-invariant).
    pub fn ball_indices(&self, center: &[f64], r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_in_ball(center, r, |i| out.push(i));
        out
    }

    /// `#(Λ ∩ B_r(center))`.
    pub fn count_in_ball(&self, center: &[f64], r: f64) -> usize {
        let mut c = 0;
        self.for_each_in_ball(center, r, |_| c += 1);
        c
    }

    fn for_each_in_ball(&self, center: &[f64], r: f64, mut f: impl FnMut(usize)) {
        let n = self.spec.dim();
        let range = if n == 0 {
            0..self.points.len()
        } else {
            let a = self.spec.sort_axis().unwrap_or(0);
            self.slab(center[a] - r, center[a] + r)
        };
        let mut buf = vec![0.0; n];
        let mut neg = vec![0.0; n];
        for (v, c) in neg.iter_mut().zip(center) {
            *v = -c;
        }
        for i in range {
            self.spec.multiply_into(&neg, self.points[i].coords(), &mut buf);
            if inside(self.norm.eval(&self.spec, &buf), r) {
                f(i);
            }
        }
    }

    /// Distance from `y` to the nearest point, `|y^{-1} λ|` minimized over `λ`.
    pub fn nearest_distance(&self, y: &[f64]) -> f64 {
        let n = self.spec.dim();
        if self.points.is_empty() {
            return f64::INFINITY;
        }
        if n == 0 {
            return 0.0;
        }
        let a = self.spec.sort_axis().unwrap_or(0);
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let mut buf = vec![0.0; n];
        let mut best = f64::INFINITY;
        let start = self.axis.partition_point(|&v| v < y[a]);
        let mut dist = |i: usize, best: &mut f64| {
            self.spec.multiply_into(&neg, self.points[i].coords(), &mut buf);
            *best = best.min(self.norm.eval(&self.spec, &buf));
        };
        let mut i = start;
        while i < self.points.len() && self.axis[i] - y[a] < best {
            dist(i, &mut best);
            i += 1;
        }
        let mut i = start;
        while i > 0 && y[a] - self.axis[i - 1] < best {
            dist(i - 1, &mut best);
            i -= 1;
        }
        best
    }
}

/// `sep(Λ)`: smallest distance between distinct points of the truncation.
pub fn separation(ps: &PointSet) -> Result<f64> {
    if ps.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: ps.len() });
    }
    let spec = ps.spec();
    let n = spec.dim();
    let best = (0..ps.len())
        .into_par_iter()
        .map(|i| {
            let mut buf = vec![0.0; n];
            let neg: Vec<f64> = ps.points[i].coords().iter().map(|v| -v).collect();
            let mut local = f64::INFINITY;
            let mut j = i + 1;
            while j < ps.len() && ps.axis[j] - ps.axis[i] < local {
                spec.multiply_into(&neg, ps.points[j].coords(), &mut buf);
                local = local.min(ps.norm.eval(spec, &buf));
                j += 1;
            }
            local
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

/// Visits the points of a coordinate grid with pitch `pitch^{w_i}` along axis `i`
/// that fall in the ball `B_radius(e)` (open, or closed when `closed`), keeping
/// at most about `cap` of them by a deterministic stride.
fn ball_grid(spec: &GroupSpec, norm: &HomogeneousNorm, radius: f64, pitch: f64, closed: bool, cap: usize) -> Vec<Vec<f64>> {
    let n = spec.dim();
    if n == 0 {
        return vec![Vec::new()];
    }
    let steps: Vec<f64> = spec.weights().iter().map(|&w| pitch.powi(w as i32)).collect();
    let half: Vec<i64> = spec
        .weights()
        .iter()
        .zip(&steps)
        .map(|(&w, s)| (radius.powi(w as i32) / s * (1.0 + 1e-12)).floor() as i64)
        .collect();
    let sizes: Vec<u64> = half.iter().map(|h| (2 * h + 1) as u64).collect();
    let total: u64 = sizes.iter().product();
    let stride = if cap > 0 && total > cap as u64 { total.div_ceil(cap as u64) } else { 1 };
    let mut out = Vec::new();
    let mut x = vec![0.0; n];
    let mut idx = 0u64;
    while idx < total {
        let mut rem = idx;
        for i in (0..n).rev() {
            let k = (rem % sizes[i]) as i64 - half[i];
            rem /= sizes[i];
            x[i] = k as f64 * steps[i];
        }
        let d = norm.eval(spec, &x);
        let keep = if closed { d <= radius * (1.0 + BALL_SLACK) } else { inside(d, radius) };
        if keep {
            out.push(x.clone());
        }
        idx += stride;
    }
    out
}

/// `rel(Λ) = sup_x #(Λ ∩ B_1(x))` over the centers `λ δ`, `δ` on a grid of `B_1(e)`
/// with pitch `min(sep/4, 1/4)`, plus the points themselves.
pub fn relative_separation(ps: &PointSet) -> usize {
    if ps.is_empty() {
        return 0;
    }
    let spec = ps.spec();
    let pitch = separation(ps).map_or(0.25, |s| (s / 4.0).min(0.25));
    let deltas = ball_grid(spec, &ps.norm, 1.0, pitch, false, 0);
    let counts: Vec<usize> = (0..ps.len())
        .into_par_iter()
        .map(|i| {
            let mut c = vec![0.0; spec.dim()];
            let mut best = ps.count_in_ball(ps.points[i].coords(), 1.0);
            for d in &deltas {
                spec.multiply_into(ps.points[i].coords(), d, &mut c);
                best = best.max(ps.count_in_ball(&c, 1.0));
            }
            best
        })
        .collect();
    counts.into_iter().max().unwrap_or(0)
}

/// Center sampling for [`beurling_density`].
#[derive(Clone, Copy, Debug)]
pub struct CenterSampling {
    /// Grid pitch (raised to the coordinate weight per axis). Defaults to `sep/4`.
    pub pitch: Option<f64>,
    /// Upper bound on grid centers per radius, enforced by a deterministic stride.
    pub max_centers: usize,
    /// Seed of the Monte Carlo ball volume for norms without a closed form.
    pub volume_seed: u64,
}

impl Default for CenterSampling {
    fn default() -> Self {
        Self { pitch: None, max_centers: 40_000, volume_seed: 0 }
    }
}

/// Finite-truncation estimate of the lower and upper Beurling densities.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityEstimate {
    pub lower: f64,
    pub upper: f64,
    pub radii_used: Vec<f64>,
    pub per_radius_inf: Vec<f64>,
    pub per_radius_sup: Vec<f64>,
    pub center_sample_count: usize,
}

/// For each radius `R`, the inf and sup over sampled centers `x ∈ B_{R_max - R}(e)`
/// of `#(Λ ∩ B_R(x)) / μ(B_R)`. The reported densities are the values at the largest radius.
pub fn beurling_density(ps: &PointSet, radii: &[f64], sampling: CenterSampling) -> Result<DensityEstimate> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("no radii given".into()));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::InvalidArgument("radii must be positive and increasing".into()));
    }
    let rmax = *radii.last().expect("nonempty");
    if ps.window_radius < 2.0 * rmax * (1.0 - 1e-12) {
        return Err(Error::WindowTooSmall { window: ps.window_radius, needed: 2.0 * rmax });
    }
    let spec = ps.spec();
    let n_inf = radii.len();
    if ps.is_empty() {
        return Ok(DensityEstimate {
            lower: 0.0,
            upper: 0.0,
            radii_used: radii.to_vec(),
            per_radius_inf: vec![0.0; n_inf],
            per_radius_sup: vec![0.0; n_inf],
            center_sample_count: 0,
        });
    }
    let pitch = match sampling.pitch {
        Some(p) if p > 0.0 => p,
        Some(p) => return Err(Error::InvalidArgument(format!("center pitch must be positive, got {p}"))),
        None => separation(ps).map_or(rmax / 8.0, |s| s / 4.0),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.volume_seed);
    let mut inf = Vec::with_capacity(n_inf);
    let mut sup = Vec::with_capacity(n_inf);
    let mut total_centers = 0;
    for &r in radii {
        let vol = spec.ball_volume(&ps.norm, r, &mut rng, 200_000)?.value;
        let inner = ps.window_radius - r;
        let mut centers = ball_grid(spec, &ps.norm, inner, pitch, false, sampling.max_centers);
        let stride = (ps.len() / sampling.max_centers.max(1)).max(1);
        centers.extend(
            ps.points
                .iter()
                .step_by(stride)
                .filter(|p| inside(ps.norm.eval(spec, p.coords()), inner))
                .map(|p| p.coords().to_vec()),
        );
        let counts: Vec<usize> = centers.par_iter().map(|c| ps.count_in_ball(c, r)).collect();
        total_centers += counts.len();
        let lo = counts.iter().copied().min().unwrap_or(0) as f64 / vol;
        let hi = counts.iter().copied().max().unwrap_or(0) as f64 / vol;
        inf.push(lo);
        sup.push(hi);
    }
    Ok(DensityEstimate {
        lower: *inf.last().expect("nonempty"),
        upper: *sup.last().expect("nonempty"),
        radii_used: radii.to_vec(),
        per_radius_inf: inf,
        per_radius_sup: sup,
        center_sample_count: total_centers,
    })
}

/// Pointwise dilation `D_r(Λ)`; the window scales to `r R_max`.
pub fn dilate_set(ps: &PointSet, r: f64) -> Result<PointSet> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::NonPositiveScale(r));
    }
    let spec = ps.spec();
    let scale_vec = |v: &[f64]| -> Vec<f64> {
        v.iter().zip(spec.weights()).map(|(x, &w)| x * r.powi(w as i32)).collect()
    };
    fn dilate_gen(g: &Generator, r: f64, f: &dyn Fn(&[f64]) -> Vec<f64>) -> Generator {
        match g {
            Generator::Lattice { basis } => Generator::Lattice { basis: basis.iter().map(|b| f(b)).collect() },
            Generator::QuasiLattice { basis, complement } => Generator::QuasiLattice {
                basis: basis.iter().map(|b| f(b)).collect(),
                complement: f(complement),
            },
            Generator::Explicit => Generator::Explicit,
            Generator::Perturbed { base, jitter, seed } => Generator::Perturbed {
                base: Box::new(dilate_gen(base, r, f)),
                jitter: jitter * r,
                seed: *seed,
            },
        }
    }
    let generator = if r == 1.0 { ps.generator.clone() } else { dilate_gen(&ps.generator, r, &scale_vec) };
    let mut points = ps.points.clone();
    for p in points.iter_mut() {
        spec.dilate_in_place(p.coords_mut(), r)?;
    }
    let axis = points
        .iter()
        .map(|p| spec.sort_axis().map_or(0.0, |a| p.coords()[a]))
        .collect();
    Ok(PointSet {
        spec: ps.spec.clone(),
        norm: ps.norm,
        points,
        axis,
        window_radius: r * ps.window_radius,
        generator,
    })
}

/// Smallest `R` on the grid `{k sep/2}` such that the open balls `B_R(λ)` cover every
/// grid point of the closed ball of radius `R_max/2`. Infinite when no grid value up
/// to `R_max/2` works.
pub fn relative_density_radius(ps: &PointSet) -> f64 {
    if ps.is_empty() {
        return f64::INFINITY;
    }
    let spec = ps.spec();
    let half = ps.window_radius / 2.0;
    let sep = separation(ps).ok();
    let pitch = sep.map_or(half / 8.0, |s| (s / 4.0).min(half / 8.0));
    let step = sep.map_or(half / 8.0, |s| s / 2.0);
    let grid = ball_grid(spec, &ps.norm, half, pitch, true, 60_000);
    let covering = grid
        .par_iter()
        .map(|y| ps.nearest_distance(y))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);
    let mut k = (covering / step).floor().max(0.0);
    loop {
        let r = k * step;
        if r > covering * (1.0 + BALL_SLACK) && r > 0.0 {
            return if r <= half * (1.0 + 1e-12) { r } else { f64::INFINITY };
        }
        if r > half {
            return f64::INFINITY;
        }
        k += 1.0;
    }
}

/// Finite weak-closeness predicate: every `λ ∈ Λ1 ∩ B_R(e)` lies in `B_ε(e) Λ2`
/// and vice versa.
pub fn weak_distance(ps1: &PointSet, ps2: &PointSet, r: f64, eps: f64) -> Result<bool> {
    if !(eps > 0.0) || !(r > 0.0) {
        return Err(Error::InvalidArgument("R and ε must be positive".into()));
    }
    for ps in [ps1, ps2] {
        if ps.window_radius < r + eps {
            return Err(Error::WindowTooSmall { window: ps.window_radius, needed: r + eps });
        }
    }
    Ok(contained(ps1, ps2, r, eps) && contained(ps2, ps1, r, eps))
}

fn contained(a: &PointSet, b: &PointSet, r: f64, eps: f64) -> bool {
    let spec = a.spec();
    let n = spec.dim();
    let ax = spec.sort_axis().unwrap_or(0);
    a.points
        .par_iter()
        .filter(|p| inside(a.norm.eval(spec, p.coords()), r))
        .all(|p| {
            if n == 0 {
                return !b.is_empty();
            }
            let mut buf = vec![0.0; n];
            b.slab(p.coords()[ax] - eps, p.coords()[ax] + eps).any(|j| {
                spec.right_quotient_into(p.coords(), b.points[j].coords(), &mut buf);
                inside(a.norm.eval(spec, &buf), eps)
            })
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2(window: f64) -> PointSet {
        PointSet::lattice(Arc::new(GroupSpec::abelian(2)), vec![vec![1.0, 0.0], vec![0.0, 1.0]], window).unwrap()
    }

    #[test]
    fn lattice_truncation_is_open() {
        let ps = z2(3.0);
        assert_eq!(ps.len(), 25);
        assert!(ps.points().iter().all(|p| p.coords().iter().all(|v| v.abs() < 3.0)));
    }

    #[test]
    fn separation_examples() {
        assert_eq!(separation(&z2(5.0)).unwrap(), 1.0);
        let d = dilate_set(&z2(5.0), 2.0).unwrap();
        assert_eq!(separation(&d).unwrap(), 2.0);
        assert!(separation(&PointSet::explicit(Arc::new(GroupSpec::abelian(2)), HomogeneousNorm::WeightedMax, vec![vec![0.0, 0.0]], 1.0).unwrap()).is_err());
    }

    #[test]
    fn relative_separation_examples() {
        assert_eq!(relative_separation(&z2(5.0)), 4);
        let spec = Arc::new(GroupSpec::abelian(2));
        let one = PointSet::explicit(spec, HomogeneousNorm::WeightedMax, vec![vec![0.0, 0.0]], 1.0).unwrap();
        assert_eq!(relative_separation(&one), 1);
    }

    #[test]
    fn density_of_integer_lattice() {
        let est = beurling_density(&z2(40.0), &[5.0, 10.0, 20.0], CenterSampling::default()).unwrap();
        assert!((est.lower - 1.0).abs() <= 0.05, "{est:?}");
        assert!((est.upper - 1.0).abs() <= 0.05, "{est:?}");
        assert!(est.lower <= est.upper);
    }

    #[test]
    fn density_window_guard() {
        assert!(matches!(
            beurling_density(&z2(10.0), &[6.0], CenterSampling::default()),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn relative_density_examples() {
        assert_eq!(relative_density_radius(&z2(20.0)), 1.0);
        let half = PointSet::lattice(Arc::new(GroupSpec::abelian(2)), vec![vec![0.5, 0.0], vec![0.0, 0.5]], 20.0).unwrap();
        assert_eq!(relative_density_radius(&half), 0.5);
        let spec = Arc::new(GroupSpec::abelian(2));
        let one = PointSet::explicit(spec, HomogeneousNorm::WeightedMax, vec![vec![0.0, 0.0]], 20.0).unwrap();
        assert!(relative_density_radius(&one).is_infinite());
    }

    #[test]
    fn weak_distance_examples() {
        let a = z2(12.0);
        let spec = Arc::new(GroupSpec::abelian(2));
        let shifted = PointSet::explicit(
            spec.clone(),
            HomogeneousNorm::WeightedMax,
            a.points().iter().map(|p| vec![p.coords()[0] + 0.01, p.coords()[1]]).collect(),
            11.5,
        )
        .unwrap();
        assert!(weak_distance(&a, &shifted, 10.0, 0.02).unwrap());
        let two = PointSet::lattice(spec, vec![vec![2.0, 0.0], vec![0.0, 2.0]], 12.0).unwrap();
        assert!(!weak_distance(&a, &two, 10.0, 0.4).unwrap());
        assert!(weak_distance(&a, &a, 10.0, 1e-6).unwrap());
    }
}
