//! The Schrödinger representation `π(x, ω) = M_ω T_x` acting on sampled signals.
//!
//! Signals live on a uniform grid of `M` points per axis with step `h`, centered at
//! `center`: `t_k = center + (k - M/2) h`. Translations act through the discrete
//! Fourier transform (band-limited interpolation), so they are exactly unitary and
//! wrap around the grid; integer multiples of `h` reduce to an exact circular shift.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::c64;
use crate::error::{Error, Result};

/// Sampling grid shared by a family of signals.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub dims: usize,
    pub m: usize,
    pub step: f64,
    pub center: Vec<f64>,
}

impl Grid {
    pub fn new(dims: usize, m: usize, step: f64, center: Vec<f64>) -> Result<Self> {
        if dims == 0 || m < 2 || !(step > 0.0) || center.len() != dims {
            return Err(Error::InvalidArgument("grid needs dims >= 1, M >= 2, h > 0 and a center per axis".into()));
        }
        Ok(Self { dims, m, step, center })
    }

    /// One-dimensional grid centered at the origin.
    pub fn line(m: usize, step: f64) -> Self {
        Self::new(1, m, step, vec![0.0]).expect("valid line grid")
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate of sample `k` along `axis`.
    #[inline]
    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        self.center[axis] + (k as f64 - (self.m / 2) as f64) * self.step
    }

    /// Half the periodic length `M h / 2`; translations beyond it alias.
    pub fn half_length(&self) -> f64 {
        0.5 * self.m as f64 * self.step
    }

    /// Nyquist frequency `1 / (2h)`.
    pub fn nyquist(&self) -> f64 {
        0.5 / self.step
    }

    fn multi_index(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.dims).rev() {
            out[a] = flat % self.m;
            flat /= self.m;
        }
    }

    /// Sample coordinates of the flat index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.dims];
        self.multi_index(flat, &mut idx);
        idx.iter().enumerate().map(|(a, &k)| self.coord(a, k)).collect()
    }
}

/// A sampled function on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    grid: Grid,
    samples: Vec<c64>,
}

/// A point `(x, ω)` of phase space `R^d x R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub omega: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, omega: Vec<f64>) -> Self {
        Self { x, omega }
    }

    pub fn line(x: f64, omega: f64) -> Self {
        Self { x: vec![x], omega: vec![omega] }
    }

    pub fn is_zero(&self) -> bool {
        self.x.iter().chain(&self.omega).all(|v| *v == 0.0)
    }
}

/// Phase convention for the projective representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// `π(x, ω) = M_ω T_x`.
    #[default]
    TranslationFirst,
    /// `π(x, ω) = e^{-πi x·ω} M_ω T_x`.
    Symmetric,
}

/// Cocycle `σ` with `π(a) π(b) = σ(a, b) π(a + b)`.
pub fn cocycle(a: &PhasePoint, b: &PhasePoint, convention: PhaseConvention) -> c64 {
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| p * q).sum::<f64>();
    let phase = match convention {
        PhaseConvention::TranslationFirst => -2.0 * PI * dot(&a.x, &b.omega),
        PhaseConvention::Symmetric => PI * (dot(&b.x, &a.omega) - dot(&a.x, &b.omega)),
    };
    c64::from_polar(1.0, phase)
}

type Plan = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANNER: RefCell<(FftPlanner<f64>, Option<(usize, Plan)>)> = RefCell::new((FftPlanner::new(), None));
}

fn plans(m: usize) -> Plan {
    PLANNER.with(|cell| {
        let mut st = cell.borrow_mut();
        if let Some((n, p)) = &st.1 {
            if *n == m {
                return p.clone();
            }
        }
        let f = st.0.plan_fft_forward(m);
        let i = st.0.plan_fft_inverse(m);
        st.1 = Some((m, (f.clone(), i.clone())));
        (f, i)
    })
}

/// Signed DFT frequency of bin `k` for `M` samples with step `h`.
fn bin_frequency(k: usize, m: usize, h: f64) -> f64 {
    let s = if k < m.div_ceil(2) { k as f64 } else { k as f64 - m as f64 };
    s / (m as f64 * h)
}

impl Signal {
    pub fn new(grid: Grid, samples: Vec<c64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: samples.len() });
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> c64) -> Self {
        let samples = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self { grid, samples }
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self { grid, samples: vec![c64::new(0.0, 0.0); n] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[c64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [c64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<c64> {
        self.samples
    }

    /// `h^d`, the quadrature weight of one sample.
    pub fn cell_volume(&self) -> f64 {
        self.grid.step.powi(self.grid.dims as i32)
    }

    pub fn norm(&self) -> f64 {
        (self.cell_volume() * self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Rescales to unit `L^2` norm.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::ZeroWindow);
        }
        self.samples.iter_mut().for_each(|z| *z /= n);
        Ok(self)
    }

    fn check_compatible(&self, other: &Signal) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::IncompatibleGrids);
        }
        Ok(())
    }

    /// `<self, other> = h^d sum self conj(other)`.
    pub fn inner(&self, other: &Signal) -> Result<c64> {
        self.check_compatible(other)?;
        Ok(inner_slices(&self.samples, &other.samples) * self.cell_volume())
    }

    fn check_translation(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.grid.dims {
            return Err(Error::DimensionMismatch { expected: self.grid.dims, got: x.len() });
        }
        let l = self.grid.half_length();
        if x.iter().any(|v| v.abs() > l) {
            return Err(Error::OutsideGrid(format!("translation {x:?} (half length {l})")));
        }
        Ok(())
    }

    fn check_modulation(&self, omega: &[f64]) -> Result<()> {
        if omega.len() != self.grid.dims {
            return Err(Error::DimensionMismatch { expected: self.grid.dims, got: omega.len() });
        }
        let nq = self.grid.nyquist();
        if omega.iter().any(|v| v.abs() > nq) {
            return Err(Error::OutsideGrid(format!("modulation {omega:?} (Nyquist {nq})")));
        }
        Ok(())
    }

    /// `T_x f(t) = f(t - x)`.
    pub fn translate(&self, x: &[f64]) -> Result<Signal> {
        self.check_translation(x)?;
        let mut out = self.clone();
        for (axis, &xa) in x.iter().enumerate() {
            if xa == 0.0 {
                continue;
            }
            let shift = xa / self.grid.step;
            let rounded = shift.round();
            if (shift - rounded).abs() <= 1e-12 * shift.abs().max(1.0) {
                out.circular_shift(axis, rounded as i64);
            } else {
                out.fourier_shift(axis, xa);
            }
        }
        Ok(out)
    }

    /// `M_ω f(t) = e^{2πi ω·t} f(t)`.
    pub fn modulate(&self, omega: &[f64]) -> Result<Signal> {
        self.check_modulation(omega)?;
        let mut out = self.clone();
        if omega.iter().all(|w| *w == 0.0) {
            return Ok(out);
        }
        let g = &self.grid;
        let mut idx = vec![0; g.dims];
        for (flat, z) in out.samples.iter_mut().enumerate() {
            g.multi_index(flat, &mut idx);
            let phase: f64 = idx.iter().enumerate().map(|(a, &k)| omega[a] * g.coord(a, k)).sum();
            *z *= c64::from_polar(1.0, 2.0 * PI * phase);
        }
        Ok(out)
    }

    fn axis_lines(&self, axis: usize) -> (usize, usize) {
        // stride of the axis and number of independent lines
        let m = self.grid.m;
        let stride = m.pow((self.grid.dims - 1 - axis) as u32);
        (stride, self.grid.len() / m)
    }

    fn for_each_line(&mut self, axis: usize, mut f: impl FnMut(&mut [c64])) {
        let m = self.grid.m;
        let (stride, _) = self.axis_lines(axis);
        let mut line = vec![c64::new(0.0, 0.0); m];
        let total = self.grid.len();
        for base in 0..total {
            // a line starts at every index whose axis component is zero
            if (base / stride) % m != 0 {
                continue;
            }
            for k in 0..m {
                line[k] = self.samples[base + k * stride];
            }
            f(&mut line);
            for k in 0..m {
                self.samples[base + k * stride] = line[k];
            }
        }
    }

    fn circular_shift(&mut self, axis: usize, s: i64) {
        let m = self.grid.m as i64;
        let r = s.rem_euclid(m) as usize;
        self.for_each_line(axis, |line| line.rotate_right(r));
    }

    fn fourier_shift(&mut self, axis: usize, x: f64) {
        let m = self.grid.m;
        let h = self.grid.step;
        let (fwd, inv) = plans(m);
        let phases: Vec<c64> = (0..m)
            .map(|k| c64::from_polar(1.0, -2.0 * PI * bin_frequency(k, m, h) * x) / m as f64)
            .collect();
        self.for_each_line(axis, |line| {
            fwd.process(line);
            for (z, p) in line.iter_mut().zip(&phases) {
                *z *= p;
            }
            inv.process(line);
        });
    }

    /// Discrete Fourier transform samples with their frequencies (unnormalized).
    fn spectrum_line(&self) -> Vec<(f64, c64)> {
        let m = self.grid.m;
        let (fwd, _) = plans(m);
        let mut line = self.samples.clone();
        fwd.process(&mut line);
        line.into_iter()
            .enumerate()
            .map(|(k, z)| (bin_frequency(k, m, self.grid.step), z))
            .collect()
    }
}

pub(crate) fn inner_slices(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// `π(λ) g` under the given phase convention. `λ = 0` returns `g` unchanged.
pub fn apply_pi_with(g: &Signal, lambda: &PhasePoint, convention: PhaseConvention) -> Result<Signal> {
    if lambda.is_zero() {
        return Ok(g.clone());
    }
    g.check_modulation(&lambda.omega)?;
    let mut out = g.translate(&lambda.x)?.modulate(&lambda.omega)?;
    if convention == PhaseConvention::Symmetric {
        let dot: f64 = lambda.x.iter().zip(&lambda.omega).map(|(a, b)| a * b).sum();
        let c = c64::from_polar(1.0, -PI * dot);
        out.samples.iter_mut().for_each(|z| *z *= c);
    }
    Ok(out)
}

/// `π(x, ω) g = M_ω T_x g`.
pub fn apply_pi(g: &Signal, lambda: &PhasePoint) -> Result<Signal> {
    apply_pi_with(g, lambda, PhaseConvention::TranslationFirst)
}

/// Standard windows on one-dimensional grids (tensor products for `d > 1`),
/// normalized to unit discrete `L^2` norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WindowKind {
    /// `2^{1/4} e^{-π t^2}`.
    Gaussian,
    /// Hermite function of the given order, orthonormal family built on the Gaussian.
    Hermite(usize),
    /// `e^{-|t|}`.
    TwoSidedExponential,
    /// Indicator of `[-1/2, 1/2]`.
    Box,
    /// `sin(πt)/(πt)`, whose Fourier transform is a box.
    Sinc,
}

/// Hermite functions `h_0 .. h_n` at `t`.
pub fn hermite_functions(n: usize, t: f64) -> Vec<f64> {
    let s = (2.0 * PI).sqrt() * t;
    let mut out = Vec::with_capacity(n + 1);
    out.push(2f64.powf(0.25) * (-PI * t * t).exp());
    if n >= 1 {
        out.push(2f64.sqrt() * s * out[0]);
    }
    for k in 2..=n {
        let kf = k as f64;
        let v = (2.0 / kf).sqrt() * s * out[k - 1] - ((kf - 1.0) / kf).sqrt() * out[k - 2];
        out.push(v);
    }
    out
}

fn profile(kind: WindowKind, t: f64) -> f64 {
    match kind {
        WindowKind::Gaussian => 2f64.powf(0.25) * (-PI * t * t).exp(),
        WindowKind::Hermite(n) => hermite_functions(n, t)[n],
        WindowKind::TwoSidedExponential => (-t.abs()).exp(),
        WindowKind::Box => {
            let a = t.abs();
            if a < 0.5 - 1e-12 {
                1.0
            } else if a <= 0.5 + 1e-12 {
                0.5
            } else {
                0.0
            }
        }
        WindowKind::Sinc => {
            if t == 0.0 {
                1.0
            } else {
                (PI * t).sin() / (PI * t)
            }
        }
    }
}

/// Window of the given kind centered at the grid center.
pub fn window(grid: &Grid, kind: WindowKind) -> Result<Signal> {
    let center = grid.center.clone();
    Signal::from_fn(grid.clone(), |t| {
        let v: f64 = t.iter().zip(&center).map(|(ti, ci)| profile(kind, ti - ci)).product();
        c64::new(v, 0.0)
    })
    .normalized()
}

/// Smallest radii (in time and frequency) outside of which the signal carries
/// at most `tail^2` of its energy.
pub fn essential_radius(g: &Signal, tail: f64) -> (f64, f64) {
    let grid = g.grid();
    let total: f64 = g.samples().iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return (0.0, 0.0);
    }
    let mut by_time: Vec<(f64, f64)> = (0..grid.len())
        .map(|i| {
            let p = grid.point(i);
            let r = p.iter().zip(&grid.center).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max);
            (r, g.samples()[i].norm_sqr())
        })
        .collect();
    let time = tail_radius(&mut by_time, total, tail);
    let freq = if grid.dims == 1 {
        let mut spec: Vec<(f64, f64)> = g.spectrum_line().into_iter().map(|(f, z)| (f.abs(), z.norm_sqr())).collect();
        let tot: f64 = spec.iter().map(|p| p.1).sum();
        tail_radius(&mut spec, tot, tail)
    } else {
        grid.nyquist()
    };
    (time, freq)
}

fn tail_radius(pairs: &mut [(f64, f64)], total: f64, tail: f64) -> f64 {
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let budget = tail * tail * total;
    let mut acc = 0.0;
    for &(r, e) in pairs.iter() {
        acc += e;
        if acc > budget {
            return r;
        }
    }
    0.0
}

/// Values of a short-time Fourier transform on a product grid of `x` and `ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct StftMatrix {
    pub xs: Vec<f64>,
    pub omegas: Vec<f64>,
    /// Row-major: `values[i * omegas.len() + j] = V_g f(xs[i], omegas[j])`.
    pub values: Vec<c64>,
}

impl StftMatrix {
    pub fn at(&self, i: usize, j: usize) -> c64 {
        self.values[i * self.omegas.len() + j]
    }
}

fn phase_table(grid: &Grid, omegas: &[f64]) -> Vec<Vec<c64>> {
    omegas
        .iter()
        .map(|&w| (0..grid.m).map(|k| c64::from_polar(1.0, -2.0 * PI * w * grid.coord(0, k))).collect())
        .collect()
}

fn check_window(g: &Signal) -> Result<()> {
    if g.samples.iter().all(|z| *z == c64::new(0.0, 0.0)) {
        return Err(Error::ZeroWindow);
    }
    Ok(())
}

/// `V_g f(x, ω) = <f, π(x, ω) g>` on a product grid (one-dimensional signals).
pub fn stft(f: &Signal, g: &Signal, xs: &[f64], omegas: &[f64]) -> Result<StftMatrix> {
    f.check_compatible(g)?;
    check_window(g)?;
    if f.grid.dims != 1 {
        return Err(Error::InvalidArgument("product-grid STFT is implemented for d = 1; use stft_points".into()));
    }
    for w in omegas {
        f.check_modulation(&[*w])?;
    }
    for x in xs {
        f.check_translation(&[*x])?;
    }
    let h = f.grid.step;
    let table = phase_table(&f.grid, omegas);
    let rows: Vec<Result<Vec<c64>>> = xs
        .par_iter()
        .map(|&x| {
            let tg = g.translate(&[x])?;
            let w: Vec<c64> = f.samples.iter().zip(&tg.samples).map(|(a, b)| a * b.conj()).collect();
            Ok(table.iter().map(|ph| w.iter().zip(ph).map(|(a, p)| a * p).sum::<c64>() * h).collect())
        })
        .collect();
    let mut values = Vec::with_capacity(xs.len() * omegas.len());
    for r in rows {
        values.extend(r?);
    }
    Ok(StftMatrix { xs: xs.to_vec(), omegas: omegas.to_vec(), values })
}

/// `V_g f(λ)` at arbitrary phase-space points (any dimension).
pub fn stft_points(f: &Signal, g: &Signal, points: &[PhasePoint]) -> Result<Vec<c64>> {
    f.check_compatible(g)?;
    check_window(g)?;
    points
        .par_iter()
        .map(|p| {
            let atom = apply_pi(g, p)?;
            f.inner(&atom)
        })
        .collect()
}

/// Symmetric grid `-extent, -extent + step, ..., extent`.
pub fn symmetric_grid(extent: f64, step: f64) -> Vec<f64> {
    let n = (extent / step).round() as i64;
    (-n..=n).map(|k| k as f64 * step).collect()
}

/// Outcome of a phase-space quadrature of the orthogonality relations.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalityReport {
    /// `∬ V_{g1} f1 conj(V_{g2} f2)`.
    pub integral: c64,
    /// `<f1, f2> conj(<g1, g2>)`.
    pub expected: c64,
    /// Estimated formal dimension `|expected| / |integral|` when the pairing is nondegenerate.
    pub formal_dimension: Option<f64>,
    /// Difference to the same sum on the grid of twice the step.
    pub refinement_delta: f64,
}

/// Checks `∬ V_{g1} f1 conj(V_{g2} f2) = <f1, f2> conj(<g1, g2>)` by Riemann sums on
/// `[-extent, extent]^2`.
pub fn verify_orthogonality(
    f1: &Signal,
    f2: &Signal,
    g1: &Signal,
    g2: &Signal,
    extent: f64,
    step: f64,
) -> Result<OrthogonalityReport> {
    if !(step > 0.0) || !(extent > 0.0) {
        return Err(Error::InvalidArgument("extent and step must be positive".into()));
    }
    for s in [f2, g1, g2] {
        f1.check_compatible(s)?;
    }
    let grid = symmetric_grid(extent, step);
    let v1 = stft(f1, g1, &grid, &grid)?;
    let v2 = stft(f2, g2, &grid, &grid)?;
    let n = grid.len();
    let (mut fine, mut coarse) = (c64::new(0.0, 0.0), c64::new(0.0, 0.0));
    let half = (n / 2) % 2;
    for i in 0..n {
        for j in 0..n {
            let p = v1.at(i, j) * v2.at(i, j).conj();
            fine += p;
            if i % 2 == half && j % 2 == half {
                coarse += p;
            }
        }
    }
    fine *= step * step;
    coarse *= 4.0 * step * step;
    let expected = f1.inner(f2)? * g1.inner(g2)?.conj();
    let scale = f1.norm() * f2.norm() * g1.norm() * g2.norm();
    let delta = (fine - coarse).norm();
    if delta > 1e-4 * scale.max(1e-300) {
        return Err(Error::NotConverged(delta / scale.max(1e-300)));
    }
    let formal_dimension = if expected.norm() > 1e-8 * scale && fine.norm() > 0.0 {
        Some(expected.norm() / fine.norm())
    } else {
        None
    };
    Ok(OrthogonalityReport { integral: fine, expected, formal_dimension, refinement_delta: delta })
}

/// Riemann-sum estimate of `∬ |V_g g|` with a divergence diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrableNormReport {
    /// Sum over `[-extent, extent]^2`.
    pub value: f64,
    /// Partial sums over squares of half-width `extent/4`, `extent/2`, `extent`.
    pub partial: Vec<(f64, f64)>,
    /// Geometric extrapolation of the remaining tail (infinite when divergent).
    pub tail_estimate: f64,
    /// Set when the increments do not shrink under doubling of the extent.
    pub divergent: bool,
}

pub fn integrable_norm(g: &Signal, extent: f64, step: f64) -> Result<IntegrableNormReport> {
    if !(step > 0.0) || !(extent > 0.0) {
        return Err(Error::InvalidArgument("extent and step must be positive".into()));
    }
    let grid = symmetric_grid(extent, step);
    let v = stft(g, g, &grid, &grid)?;
    let n = grid.len();
    let levels = [extent / 4.0, extent / 2.0, extent];
    let mut sums = [0.0; 3];
    for i in 0..n {
        for j in 0..n {
            let r = grid[i].abs().max(grid[j].abs());
            let a = v.at(i, j).norm() * step * step;
            for (s, &e) in sums.iter_mut().zip(&levels) {
                if r <= e + 1e-12 {
                    *s += a;
                }
            }
        }
    }
    let d1 = sums[1] - sums[0];
    let d2 = sums[2] - sums[1];
    let divergent = d2 > 1e-9 * sums[2] && d2 >= 0.75 * d1;
    let tail_estimate = if divergent {
        f64::INFINITY
    } else if d1 > 0.0 && d2 > 0.0 {
        let q = d2 / d1;
        d2 * q / (1.0 - q)
    } else {
        0.0
    };
    Ok(IntegrableNormReport {
        value: sums[2],
        partial: levels.iter().copied().zip(sums).collect(),
        tail_estimate,
        divergent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::line(256, 1.0 / 16.0)
    }

    #[test]
    fn zero_shift_is_bit_identical() {
        let g = window(&grid(), WindowKind::Hermite(3)).unwrap();
        let out = apply_pi(&g, &PhasePoint::line(0.0, 0.0)).unwrap();
        assert_eq!(out, g);
    }

    #[test]
    fn translation_is_unitary() {
        let g = window(&grid(), WindowKind::Gaussian).unwrap();
        let t = g.translate(&[0.3217]).unwrap();
        assert!((t.norm() - 1.0).abs() < 1e-13);
        // compare with the analytic shifted Gaussian
        let expect = Signal::from_fn(grid(), |t| c64::new(2f64.powf(0.25) * (-PI * (t[0] - 0.3217).powi(2)).exp(), 0.0));
        let err = t.samples().iter().zip(expect.samples()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn integer_shift_is_exact() {
        let g = window(&grid(), WindowKind::TwoSidedExponential).unwrap();
        let t = g.translate(&[3.0 / 16.0]).unwrap();
        assert_eq!(t.samples()[3..], g.samples()[..253]);
    }

    #[test]
    fn out_of_grid_rejected() {
        let g = window(&grid(), WindowKind::Gaussian).unwrap();
        assert!(apply_pi(&g, &PhasePoint::line(9.0, 0.0)).is_err());
        assert!(apply_pi(&g, &PhasePoint::line(0.0, 8.5)).is_err());
        let other = window(&Grid::line(128, 1.0 / 16.0), WindowKind::Gaussian).unwrap();
        assert!(matches!(g.inner(&other), Err(Error::IncompatibleGrids)));
    }

    #[test]
    fn hermite_functions_orthonormal() {
        let gr = Grid::line(1024, 1.0 / 32.0);
        let hs: Vec<Signal> = (0..8).map(|n| window(&gr, WindowKind::Hermite(n)).unwrap()).collect();
        for i in 0..8 {
            for j in 0..8 {
                let ip = hs[i].inner(&hs[j]).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cocycle_composition_law() {
        let g = window(&grid(), WindowKind::Gaussian).unwrap();
        let a = PhasePoint::line(0.75, -1.25);
        let b = PhasePoint::line(-0.5, 2.0);
        let ab = PhasePoint::line(0.25, 0.75);
        for conv in [PhaseConvention::TranslationFirst, PhaseConvention::Symmetric] {
            let lhs = apply_pi_with(&apply_pi_with(&g, &b, conv).unwrap(), &a, conv).unwrap();
            let rhs = apply_pi_with(&g, &ab, conv).unwrap();
            let s = cocycle(&a, &b, conv);
            let err = lhs.samples().iter().zip(rhs.samples()).map(|(l, r)| (l - s * r).norm()).fold(0.0, f64::max);
            assert!(err < 1e-10, "{conv:?}: {err}");
        }
    }

    #[test]
    fn gaussian_stft_closed_form() {
        let g = window(&grid(), WindowKind::Gaussian).unwrap();
        let xs = [-1.0, 0.0, 0.5];
        let ws = [-0.75, 0.0, 1.5];
        let v = stft(&g, &g, &xs, &ws).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            for (j, &w) in ws.iter().enumerate() {
                // <g, M_w T_x g> = e^{-π(x² + w²)/2} e^{-πi x w}
                let want = c64::from_polar((-PI * (x * x + w * w) / 2.0).exp(), -PI * x * w);
                assert!((v.at(i, j) - want).norm() < 1e-10);
            }
        }
    }
}
