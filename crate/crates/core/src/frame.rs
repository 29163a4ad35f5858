//! Finite-section analysis of Gabor systems `π(Λ) g` on the real line.
//!
//! Index sets live in the phase plane `R^2` with coordinates `(x, ω)` and the
//! weighted-max norm. Every bound is computed on a truncation `Λ ∩ B_R` and
//! reported as a function of `R`, with a guard band between the truncation
//! edge and the test vectors.

use std::f64::consts::PI;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::c64;
use crate::error::{Error, Result};
use crate::heisenberg::{essential_radius, hermite_functions, stft, symmetric_grid, window, Grid, PhasePoint, Signal, WindowKind};
use crate::linalg::{self, lanczos_extremes, lp_norm, matvec, LanczosOptions, SparseHermitian};
use crate::pointset::{self, dilate_set, Generator, PointSet};
use crate::schur::{schur_norm, DecayFit, EnvelopeFunction, LocalizedMatrix};

/// Energy tail used to decide whether an atom still fits on the sample grid.
const PADDING_TAIL: f64 = 1e-6;
/// Largest Gram section handled by dense eigendecomposition.
const DENSE_LIMIT: usize = 1500;
/// Gaussian Gram entries beyond this phase-space distance are below `1e-18`.
const GAUSSIAN_CUTOFF: f64 = 5.3;
const ENVELOPE_BIN: f64 = 0.25;
/// Largest quadrature pitch for phase-space `L^p` norms.
const FINE_PITCH: f64 = 0.25;

fn zero() -> c64 {
    c64::new(0.0, 0.0)
}

fn conj_mat(m: &Mat<c64>, scale: f64) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].conj() * scale)
}

/// A window together with an index set in the phase plane.
#[derive(Clone, Debug)]
pub struct CoherentSystem {
    window: Signal,
    kind: Option<WindowKind>,
    lattice: PointSet,
}

impl CoherentSystem {
    pub fn new(window: Signal, lattice: PointSet) -> Result<Self> {
        Self::build(window, None, lattice)
    }

    /// Records the window kind; Gaussian windows then use closed-form Gram entries.
    pub fn with_kind(window: Signal, kind: WindowKind, lattice: PointSet) -> Result<Self> {
        Self::build(window, Some(kind), lattice)
    }

    /// The normalized Gaussian on `grid`.
    pub fn gaussian(grid: &Grid, lattice: PointSet) -> Result<Self> {
        Self::with_kind(window(grid, WindowKind::Gaussian)?, WindowKind::Gaussian, lattice)
    }

    fn build(window: Signal, kind: Option<WindowKind>, lattice: PointSet) -> Result<Self> {
        if window.grid().dims != 1 {
            return Err(Error::InvalidArgument("coherent systems are implemented for d = 1".into()));
        }
        if lattice.spec().dim() != 2 || !lattice.spec().is_abelian() {
            return Err(Error::InvalidArgument("the index set must live in the phase plane R^2".into()));
        }
        if !(window.norm() > 0.0) {
            return Err(Error::ZeroWindow);
        }
        Ok(Self { window, kind, lattice })
    }

    pub fn window(&self) -> &Signal {
        &self.window
    }

    pub fn kind(&self) -> Option<WindowKind> {
        self.kind
    }

    pub fn lattice(&self) -> &PointSet {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    /// Same window, different index set.
    pub fn with_lattice(&self, lattice: PointSet) -> Result<Self> {
        Self::build(self.window.clone(), self.kind, lattice)
    }

    /// Truncation `Λ ∩ B_radius`.
    pub fn restrict(&self, radius: f64) -> Result<Self> {
        self.with_lattice(self.lattice.restrict(radius)?)
    }

    /// The system generated by `c g`; closed forms are dropped.
    pub fn scaled(&self, c: c64) -> Result<Self> {
        let mut w = self.window.clone();
        w.samples_mut().iter_mut().for_each(|z| *z *= c);
        Self::build(w, None, self.lattice.clone())
    }

    fn closed_form(&self) -> bool {
        self.kind == Some(WindowKind::Gaussian)
    }

    fn coords(&self) -> Vec<[f64; 2]> {
        self.lattice.points().iter().map(|p| [p.coords()[0], p.coords()[1]]).collect()
    }

    pub fn phase_point(&self, i: usize) -> PhasePoint {
        let c = self.lattice.points()[i].coords();
        PhasePoint::line(c[0], c[1])
    }

    pub fn atom(&self, i: usize) -> Result<Signal> {
        self.check_padding(&[self.coords()[i]])?;
        crate::heisenberg::apply_pi(&self.window, &self.phase_point(i))
    }

    fn check_padding(&self, pts: &[[f64; 2]]) -> Result<()> {
        let (rt, rf) = essential_radius(&self.window, PADDING_TAIL);
        let grid = self.window.grid();
        let (l, nq) = (grid.half_length(), grid.nyquist());
        for p in pts {
            if p[0].abs() + rt > l || p[1].abs() + rf > nq {
                return Err(Error::OutsideGrid(format!(
                    "atom at ({}, {}) leaves the sample grid (padding {rt:.3} in time, {rf:.3} in frequency)",
                    p[0], p[1]
                )));
            }
        }
        Ok(())
    }

    /// Atoms `π(λ) g` as the rows of an `N x M` matrix.
    pub fn atom_matrix(&self) -> Result<Mat<c64>> {
        let pts = self.coords();
        self.check_padding(&pts)?;
        atoms_at(&self.window, &pts)
    }
}

/// Rows `M_ω T_x g` for the given points; consecutive points sharing `x` reuse one translate.
fn atoms_at(g: &Signal, pts: &[[f64; 2]]) -> Result<Mat<c64>> {
    let m = g.grid().len();
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..=pts.len() {
        if k == pts.len() || pts[k][0] != pts[start][0] {
            groups.push((start, k));
            start = k;
        }
    }
    let blocks: Vec<Result<Vec<Vec<c64>>>> = groups
        .par_iter()
        .map(|&(s, e)| {
            let tg = g.translate(&[pts[s][0]])?;
            (s..e).map(|k| Ok(tg.modulate(&[pts[k][1]])?.into_samples())).collect()
        })
        .collect();
    let mut out = Mat::<c64>::zeros(pts.len(), m);
    let mut row = 0;
    for b in blocks {
        for samples in b? {
            for (t, z) in samples.into_iter().enumerate() {
                out[(row, t)] = z;
            }
            row += 1;
        }
    }
    Ok(out)
}

/// `<π(λ') g, π(λ) g>` for the normalized Gaussian.
pub fn gaussian_gram_entry(lambda: [f64; 2], lambda_prime: [f64; 2]) -> c64 {
    let (dx, dw) = (lambda_prime[0] - lambda[0], lambda_prime[1] - lambda[1]);
    let amp = (-PI * (dx * dx + dw * dw) / 2.0).exp();
    c64::from_polar(amp, PI * dw * (lambda[0] + lambda_prime[0]))
}

/// Dense Gram entries `G[i, j] = <π(λ_j) g, π(λ_i) g>`.
fn gram_entries(cs: &CoherentSystem) -> Result<Mat<c64>> {
    let pts = cs.coords();
    if cs.closed_form() {
        return Ok(Mat::from_fn(pts.len(), pts.len(), |i, j| gaussian_gram_entry(pts[i], pts[j])));
    }
    let c = cs.atom_matrix()?;
    let h = cs.window.grid().step;
    Ok(conj_mat(&(&c * c.adjoint()), h))
}

/// Gram entries computed from sampled atoms, whatever the window.
pub fn gramian_numeric(cs: &CoherentSystem) -> Result<Mat<c64>> {
    let c = cs.atom_matrix()?;
    let h = cs.window.grid().step;
    Ok(conj_mat(&(&c * c.adjoint()), h))
}

fn gaussian_sparse_gram(pts: &[[f64; 2]]) -> SparseHermitian {
    // points are sorted by x, so a window on x bounds the neighbour scan
    let rows = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let lo = pts.partition_point(|p| p[0] < pts[i][0] - GAUSSIAN_CUTOFF);
            let mut row = Vec::new();
            for (j, q) in pts.iter().enumerate().skip(lo) {
                if q[0] > pts[i][0] + GAUSSIAN_CUTOFF {
                    break;
                }
                if (q[1] - pts[i][1]).abs() <= GAUSSIAN_CUTOFF {
                    row.push((j, gaussian_gram_entry(pts[i], *q)));
                }
            }
            row
        })
        .collect();
    SparseHermitian { n: pts.len(), rows }
}

/// Radial majorant of the ambiguity function `|V_g g|` up to `extent`.
fn ambiguity_samples(cs: &CoherentSystem, extent: f64) -> Result<Vec<(f64, f64)>> {
    let grid = cs.window.grid();
    let e = extent.min(grid.half_length() * 0.999).min(grid.nyquist() * 0.999);
    let axis = symmetric_grid(e, ENVELOPE_BIN);
    let v = stft(&cs.window, &cs.window, &axis, &axis)?;
    let mut out = Vec::with_capacity(v.values.len());
    for (i, x) in axis.iter().enumerate() {
        for (j, w) in axis.iter().enumerate() {
            out.push((x.abs().max(w.abs()), v.at(i, j).norm()));
        }
    }
    Ok(out)
}

/// The Gramian `G[λ, λ'] = <π(λ') g, π(λ) g>` with its envelope attached.
///
/// The envelope is the radial majorant of the window's ambiguity function,
/// enlarged where sampled entries exceed it.
pub fn gramian(cs: &CoherentSystem) -> Result<LocalizedMatrix> {
    let entries = gram_entries(cs)?;
    let mut g = LocalizedMatrix::new(cs.lattice.clone(), cs.lattice.clone(), entries)?;
    let n = g.rows().len();
    let mut samples = Vec::with_capacity(n * n);
    let mut dmax: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = g.distance(i, j);
            dmax = dmax.max(d);
            samples.push((d, g.entries()[(i, j)].norm()));
        }
    }
    let env = if cs.closed_form() {
        let amb = EnvelopeFunction::from_fn(|r| (-PI * r * r / 2.0).exp(), ENVELOPE_BIN, dmax + ENVELOPE_BIN);
        let tail: Vec<(f64, f64)> = amb.edges().iter().zip(amb.values()).map(|(r, v)| (*r, *v)).collect();
        EnvelopeFunction::from_samples(tail.into_iter().chain(samples), ENVELOPE_BIN)
    } else {
        let amb = ambiguity_samples(cs, dmax)?;
        EnvelopeFunction::from_samples(amb.into_iter().chain(samples), ENVELOPE_BIN)
    };
    g.attach_envelope(env);
    Ok(g)
}

/// Which operator a bound refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameMode {
    /// Analysis map `f -> (<f, π(λ) g>)_λ`.
    Frame,
    /// Synthesis map `c -> Σ c_λ π(λ) g`.
    Riesz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMethod {
    GramEigen,
    FrameOperatorEigen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Frame,
    NotFrame,
    Undecided,
}

/// Truncation radii and the guard band between truncation edge and test vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameOptions {
    pub radii: Vec<f64>,
    pub guard: f64,
}

impl FrameOptions {
    /// Guard 2 keeps Hermite test functions away from the truncation edge.
    pub fn frame(radii: Vec<f64>) -> Self {
        Self { radii, guard: 2.0 }
    }

    /// Interior coefficients only reach interior atoms, so no guard is needed.
    pub fn riesz(radii: Vec<f64>) -> Self {
        Self { radii, guard: 0.0 }
    }

    pub fn for_mode(mode: FrameMode, radii: Vec<f64>) -> Self {
        match mode {
            FrameMode::Frame => Self::frame(radii),
            FrameMode::Riesz => Self::riesz(radii),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameReport {
    pub mode: FrameMode,
    pub method: BoundMethod,
    /// Values at the largest truncation.
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub radii: Vec<f64>,
    pub truncation_sizes: Vec<usize>,
    /// Dimension of the test space per truncation.
    pub test_dimensions: Vec<usize>,
    pub lower_by_truncation: Vec<f64>,
    pub upper_by_truncation: Vec<f64>,
    /// Lower bounds are non-increasing across truncations within `1e-6`.
    pub monotone: bool,
    /// Per-truncation flag: extremes came from Lanczos rather than a dense solve.
    pub iterative: Vec<bool>,
    pub verdict: Verdict,
}

impl FrameReport {
    pub fn ratios(&self) -> Vec<f64> {
        self.lower_by_truncation.iter().zip(&self.upper_by_truncation).map(|(a, b)| a / b).collect()
    }

    /// `A / B` at the largest truncation.
    pub fn ratio(&self) -> f64 {
        self.lower_bound / self.upper_bound
    }
}

/// Frame if the lower bound changed by at most 10% over the last step; not a frame
/// if `A / B < 1e-3` and still decreasing; otherwise undecided.
pub fn classify(lower: &[f64], upper: &[f64]) -> Verdict {
    let n = lower.len();
    if n < 2 {
        return Verdict::Undecided;
    }
    let (prev, last) = (lower[n - 2], lower[n - 1]);
    let ratio = last / upper[n - 1];
    if ratio < 1e-3 && last < prev {
        Verdict::NotFrame
    } else if prev > 0.0 && ((last - prev) / prev).abs() <= 0.1 && ratio >= 1e-3 {
        Verdict::Frame
    } else {
        Verdict::Undecided
    }
}

/// Orthonormal Hermite functions `h_0 .. h_{k-1}` sampled on `grid` (rows).
fn hermite_basis(grid: &Grid, k: usize) -> Result<Mat<c64>> {
    let m = grid.len();
    let h = grid.step;
    let mut raw = Mat::<c64>::zeros(k, m);
    for t in 0..m {
        let vals = hermite_functions(k - 1, grid.coord(0, t));
        for (n, v) in vals.into_iter().enumerate() {
            raw[(n, t)] = c64::new(v, 0.0);
        }
    }
    // symmetric orthonormalization against the discrete inner product
    let gram = conj_mat(&(&raw * raw.adjoint()), h);
    let (vals, vecs) = linalg::hermitian_eigen(gram.as_ref())?;
    if vals.iter().any(|v| *v < 0.5) {
        return Err(Error::OutsideGrid(format!("{k} Hermite test functions are not resolved by the grid")));
    }
    let scaled = Mat::<c64>::from_fn(k, k, |i, j| vecs[(i, j)] / vals[j].sqrt());
    let inv_sqrt = &scaled * vecs.adjoint();
    Ok(&inv_sqrt * &raw)
}

struct FrameSection {
    atoms: usize,
    k: usize,
    lower: f64,
    upper: f64,
    /// `(CQ)[λ, n] = <q_n, π(λ) g>`.
    cq: Mat<c64>,
    basis: Mat<c64>,
    min_vector: Vec<c64>,
}

fn test_dimension(rho: f64) -> usize {
    ((PI * rho * rho).floor() as usize).max(1)
}

fn frame_section(cs: &CoherentSystem, radius: f64, guard: f64) -> Result<FrameSection> {
    let rho = radius - guard;
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument(format!("guard {guard} leaves no interior at radius {radius}")));
    }
    let sub = cs.restrict(radius)?;
    if sub.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let k = test_dimension(rho);
    let basis = hermite_basis(cs.window.grid(), k)?;
    let c = sub.atom_matrix()?;
    let h = cs.window.grid().step;
    let cq = conj_mat(&(&c * basis.adjoint()), h);
    let normal = cq.adjoint() * &cq;
    let (vals, vecs) = linalg::hermitian_eigen(normal.as_ref())?;
    let min_vector = (0..k).map(|i| vecs[(i, 0)]).collect();
    Ok(FrameSection { atoms: sub.len(), k, lower: vals[0].max(0.0), upper: vals[k - 1], cq, basis, min_vector })
}

struct RieszSection {
    indices: PointSet,
    lower: f64,
    upper: f64,
    min_vector: Vec<c64>,
    iterative: bool,
}

fn riesz_section(cs: &CoherentSystem, radius: f64, guard: f64) -> Result<RieszSection> {
    let inner = radius - guard;
    if !(inner > 0.0) {
        return Err(Error::InvalidArgument(format!("guard {guard} leaves no interior at radius {radius}")));
    }
    let sub = cs.restrict(inner)?;
    if sub.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    if sub.len() > 1 && !(pointset::separation(sub.lattice())? > 1e-9) {
        return Err(Error::NotSeparated);
    }
    let n = sub.len();
    if cs.closed_form() && n > DENSE_LIMIT {
        let sparse = gaussian_sparse_gram(&sub.coords());
        let ext = lanczos_extremes(n, |v, out| sparse.apply(v, out), LanczosOptions { max_iter: 3000, tol: 1e-7, ..Default::default() })?;
        if !ext.converged {
            return Err(Error::NotConverged(ext.min));
        }
        return Ok(RieszSection {
            indices: sub.lattice.clone(),
            lower: ext.min.max(0.0),
            upper: ext.max,
            min_vector: ext.min_vector,
            iterative: true,
        });
    }
    let g = gram_entries(&sub)?;
    let (vals, vecs) = linalg::hermitian_eigen(linalg::hermitian_part(g.as_ref()).as_ref())?;
    Ok(RieszSection {
        indices: sub.lattice.clone(),
        lower: vals[0].max(0.0),
        upper: vals[n - 1],
        min_vector: (0..n).map(|i| vecs[(i, 0)]).collect(),
        iterative: false,
    })
}

fn check_geometry(cs: &CoherentSystem, mode: FrameMode) -> Result<()> {
    match mode {
        FrameMode::Frame => {
            let dense = match cs.lattice.generator() {
                Generator::Lattice { basis } => basis.len() == 2 && det2(basis).abs() > 1e-12,
                _ => pointset::relative_density_radius(cs.lattice()).is_finite(),
            };
            if !dense {
                return Err(Error::NotRelativelyDense);
            }
        }
        FrameMode::Riesz => {
            if cs.len() > 1 && !(pointset::separation(cs.lattice())? > 1e-9) {
                return Err(Error::NotSeparated);
            }
        }
    }
    Ok(())
}

fn det2(b: &[Vec<f64>]) -> f64 {
    b[0][0] * b[1][1] - b[1][0] * b[0][1]
}

/// Extreme spectral bounds across nested truncations.
///
/// Frame mode restricts the frame operator to Hermite functions concentrated in
/// `B_{R - guard}`; Riesz mode takes the Gramian on coefficients indexed by
/// `Λ ∩ B_{R - guard}`.
pub fn frame_bounds(cs: &CoherentSystem, mode: FrameMode, opts: &FrameOptions) -> Result<FrameReport> {
    if opts.radii.is_empty() {
        return Err(Error::InvalidArgument("at least one truncation radius is required".into()));
    }
    check_geometry(cs, mode)?;
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut sizes = Vec::new();
    let mut dims = Vec::new();
    let mut iterative = Vec::new();
    for &r in &opts.radii {
        match mode {
            FrameMode::Frame => {
                let s = frame_section(cs, r, opts.guard)?;
                lower.push(s.lower);
                upper.push(s.upper);
                sizes.push(s.atoms);
                dims.push(s.k);
                iterative.push(false);
            }
            FrameMode::Riesz => {
                let s = riesz_section(cs, r, opts.guard)?;
                lower.push(s.lower);
                upper.push(s.upper);
                sizes.push(s.indices.len());
                dims.push(s.indices.len());
                iterative.push(s.iterative);
            }
        }
    }
    let monotone = lower.windows(2).all(|w| w[1] <= w[0] + 1e-6 * w[0].abs().max(1.0));
    let verdict = classify(&lower, &upper);
    Ok(FrameReport {
        mode,
        method: match mode {
            FrameMode::Frame => BoundMethod::FrameOperatorEigen,
            FrameMode::Riesz => BoundMethod::GramEigen,
        },
        lower_bound: *lower.last().unwrap(),
        upper_bound: *upper.last().unwrap(),
        radii: opts.radii.clone(),
        truncation_sizes: sizes,
        test_dimensions: dims,
        lower_by_truncation: lower,
        upper_by_truncation: upper,
        monotone,
        iterative,
        verdict,
    })
}

/// Settings for [`p_lower_bound_probe`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeOptions {
    pub radii: Vec<f64>,
    pub guard: f64,
    /// Random restarts per truncation.
    pub trials: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Compute the dual Schur-norm bound at the largest truncation.
    pub certify: bool,
}

impl ProbeOptions {
    pub fn new(mode: FrameMode, radii: Vec<f64>, seed: u64) -> Self {
        let guard = FrameOptions::for_mode(mode, Vec::new()).guard;
        Self { radii, guard, trials: 4, iterations: 60, seed, certify: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeMethod {
    /// Exact singular values (`p = 2`).
    Eigen,
    /// Smoothed descent on the norm ratio with restarts.
    RandomizedDescent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub p: f64,
    pub mode: FrameMode,
    pub method: ProbeMethod,
    pub radii: Vec<f64>,
    /// Smallest norm ratio found per truncation.
    pub lower_by_truncation: Vec<f64>,
    /// Largest norm ratio seen per truncation (normalizes the verdict).
    pub upper_by_truncation: Vec<f64>,
    /// Dual bound at the largest truncation: no test vector can go below it.
    pub certified_lower: Option<f64>,
    /// Relative reconstruction error of the minimizing test function (frame mode).
    pub reconstruction_residual: Option<f64>,
    pub verdict: Verdict,
}

impl ProbeReport {
    /// The estimate at the largest truncation.
    pub fn estimate(&self) -> f64 {
        *self.lower_by_truncation.last().unwrap_or(&0.0)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p == 1.0 || p == 2.0 || p == f64::INFINITY {
        Ok(())
    } else {
        Err(Error::UnsupportedExponent(p))
    }
}

/// Fine phase-space grid refining the lattice when it is rectangular, so that
/// lattice points are grid points; pitch at most 1/2.
fn fine_pitch(ps: &PointSet) -> ([f64; 2], bool) {
    if let Generator::Lattice { basis } = ps.generator() {
        if basis.len() == 2 && basis[0][1] == 0.0 && basis[1][0] == 0.0 {
            // strictly finer than the lattice, otherwise the quadrature reproduces the coefficients
            let refine = |a: f64| a.abs() / (a.abs() / FINE_PITCH).ceil().max(2.0);
            return ([refine(basis[0][0]), refine(basis[1][1])], true);
        }
    }
    ([FINE_PITCH, FINE_PITCH], false)
}

fn fine_points(pitch: [f64; 2], extent: f64) -> Vec<[f64; 2]> {
    let nx = (extent / pitch[0] + 1e-9).floor() as i64;
    let nw = (extent / pitch[1] + 1e-9).floor() as i64;
    let mut out = Vec::with_capacity(((2 * nx + 1) * (2 * nw + 1)) as usize);
    for i in -nx..=nx {
        for j in -nw..=nw {
            out.push([i as f64 * pitch[0], j as f64 * pitch[1]]);
        }
    }
    out
}

/// Ratio `s_num ||N c||_p / (s_den ||D c||_p)`; `D = I` when absent.
struct RatioProblem {
    num: Mat<c64>,
    num_adj: Mat<c64>,
    num_scale: f64,
    den: Option<Mat<c64>>,
    den_adj: Option<Mat<c64>>,
    den_scale: f64,
    p: f64,
}

const LINF_SMOOTHING: f64 = 64.0;

impl RatioProblem {
    fn new(num: Mat<c64>, num_scale: f64, den: Option<Mat<c64>>, den_scale: f64, p: f64) -> Self {
        let num_adj = num.adjoint().to_owned();
        let den_adj = den.as_ref().map(|d| d.adjoint().to_owned());
        Self { num, num_adj, num_scale, den, den_adj, den_scale, p }
    }

    fn dim(&self) -> usize {
        self.num.ncols()
    }

    fn images(&self, c: &[c64]) -> (Vec<c64>, Vec<c64>) {
        let u = matvec(self.num.as_ref(), c);
        let v = match &self.den {
            Some(d) => matvec(d.as_ref(), c),
            None => c.to_vec(),
        };
        (u, v)
    }

    fn ratio(&self, c: &[c64]) -> f64 {
        let (u, v) = self.images(c);
        let d = self.den_scale * lp_norm(&v, self.p);
        if d == 0.0 {
            return f64::INFINITY;
        }
        self.num_scale * lp_norm(&u, self.p) / d
    }

    /// Smoothed norm and its gradient with respect to `conj(v)`.
    fn smooth(&self, v: &[c64]) -> (f64, Vec<c64>) {
        let vmax = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if vmax == 0.0 {
            return (0.0, vec![zero(); v.len()]);
        }
        if self.p == 1.0 {
            let mu = 1e-4 * vmax;
            let mut s = 0.0;
            let grad = v
                .iter()
                .map(|z| {
                    let r = (z.norm_sqr() + mu * mu).sqrt();
                    s += r;
                    z / (2.0 * r)
                })
                .collect();
            (s, grad)
        } else {
            let q = LINF_SMOOTHING;
            let w: Vec<f64> = v.iter().map(|z| z.norm() / vmax).collect();
            let sum: f64 = w.iter().map(|x| x.powf(q)).sum();
            let n = vmax * sum.powf(1.0 / q);
            let grad = v
                .iter()
                .zip(&w)
                .map(|(z, x)| {
                    if *x == 0.0 {
                        zero()
                    } else {
                        // d/d conj(v_i) of (Σ|v|^q)^{1/q}
                        z * (0.5 * x.powf(q - 2.0) / sum * n / (vmax * vmax))
                    }
                })
                .collect();
            (n, grad)
        }
    }

    /// Smoothed `ln ||Nc|| - ln ||Dc||` and its gradient in `conj(c)`.
    fn objective(&self, c: &[c64]) -> (f64, Vec<c64>) {
        let (u, v) = self.images(c);
        let (nu, gu) = self.smooth(&u);
        let (nv, gv) = self.smooth(&v);
        if nu == 0.0 || nv == 0.0 {
            return (f64::NEG_INFINITY, vec![zero(); c.len()]);
        }
        let back_u = matvec(self.num_adj.as_ref(), &gu);
        let back_v = match &self.den_adj {
            Some(d) => matvec(d.as_ref(), &gv),
            None => gv,
        };
        let grad = back_u.iter().zip(&back_v).map(|(a, b)| a / nu - b / nv).collect();
        (nu.ln() - nv.ln(), grad)
    }

    /// Backtracking normalized-gradient descent; returns the best exact ratio,
    /// its vector and the largest ratio seen.
    fn descend(&self, start: Vec<c64>, iterations: usize) -> (f64, Vec<c64>, f64) {
        let normalize = |mut c: Vec<c64>| {
            let n = lp_norm(&c, 2.0);
            if n > 0.0 {
                c.iter_mut().for_each(|z| *z /= n);
            }
            c
        };
        let mut c = normalize(start);
        let mut best = (self.ratio(&c), c.clone());
        let mut worst = best.0;
        let (mut f, mut g) = self.objective(&c);
        let mut step = 0.1;
        for _ in 0..iterations {
            let gn = lp_norm(&g, 2.0);
            if gn == 0.0 || !f.is_finite() {
                break;
            }
            let trial = normalize(c.iter().zip(&g).map(|(a, b)| a - b * (step / gn)).collect());
            let (ft, gt) = self.objective(&trial);
            if ft < f {
                c = trial;
                f = ft;
                g = gt;
                step = (step * 1.3).min(1.0);
                let r = self.ratio(&c);
                worst = worst.max(r);
                if r < best.0 {
                    best = (r, c.clone());
                }
            } else {
                step *= 0.5;
                if step < 1e-8 {
                    break;
                }
            }
        }
        (best.0, best.1, worst)
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<c64> {
    (0..n).map(|_| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

/// Empirical lower bound of the analysis (frame) or synthesis (Riesz) map between
/// `ℓ^p` and the discretized `L^p` norm of the short-time Fourier transform.
///
/// `p = 2` is exact. For `p ∈ {1, ∞}` the estimate is the smallest ratio found by
/// descent from the `p = 2` minimizer, the previous truncation's minimizer and
/// random restarts; the certified value is the reciprocal Schur norm of the
/// dual reproducing matrix.
pub fn p_lower_bound_probe(cs: &CoherentSystem, mode: FrameMode, p: f64, opts: &ProbeOptions) -> Result<ProbeReport> {
    check_exponent(p)?;
    if opts.radii.is_empty() {
        return Err(Error::InvalidArgument("at least one truncation radius is required".into()));
    }
    if p == 2.0 {
        let rep = frame_bounds(cs, mode, &FrameOptions { radii: opts.radii.clone(), guard: opts.guard })?;
        let lower: Vec<f64> = rep.lower_by_truncation.iter().map(|v| v.sqrt()).collect();
        let upper: Vec<f64> = rep.upper_by_truncation.iter().map(|v| v.sqrt()).collect();
        return Ok(ProbeReport {
            p,
            mode,
            method: ProbeMethod::Eigen,
            radii: opts.radii.clone(),
            certified_lower: lower.last().copied(),
            reconstruction_residual: None,
            verdict: classify(&lower, &upper),
            lower_by_truncation: lower,
            upper_by_truncation: upper,
        });
    }
    check_geometry(cs, mode)?;
    let (pitch, aligned) = fine_pitch(cs.lattice());
    let cell = pitch[0] * pitch[1];
    let cell_p = if p.is_infinite() { 1.0 } else { cell.powf(1.0 / p) };
    let h = cs.window.grid().step;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut previous: Option<(Vec<c64>, Vec<[f64; 2]>)> = None;
    let mut certified = None;
    let mut residual = None;
    for (step, &r) in opts.radii.iter().enumerate() {
        let last = step + 1 == opts.radii.len();
        let (problem, mut starts, labels, fine) = match mode {
            FrameMode::Frame => {
                let s = frame_section(cs, r, opts.guard)?;
                let fine = fine_points(pitch, r + 1.0);
                cs.check_padding(&fine)?;
                let f = atoms_at(&cs.window, &fine)?;
                let fq = conj_mat(&(&f * s.basis.adjoint()), h);
                let mut starts = vec![s.min_vector.clone()];
                if let Some((prev, _)) = &previous {
                    let mut c = prev.clone();
                    c.resize(s.k, zero());
                    starts.push(c);
                }
                let labels: Vec<[f64; 2]> = (0..s.k).map(|n| [n as f64, 0.0]).collect();
                let problem = RatioProblem::new(s.cq, 1.0, Some(fq), cell_p, p);
                (problem, starts, labels, Some((f, s.basis, fine)))
            }
            FrameMode::Riesz => {
                let s = riesz_section(cs, r, opts.guard)?;
                let sub = cs.with_lattice(s.indices.clone())?;
                let idx = sub.coords();
                let fine = fine_points(pitch, r - opts.guard + 3.0);
                let x = if cs.closed_form() {
                    Mat::from_fn(fine.len(), idx.len(), |m, l| gaussian_gram_entry(fine[m], idx[l]))
                } else {
                    cs.check_padding(&fine)?;
                    let f = atoms_at(&cs.window, &fine)?;
                    let c = sub.atom_matrix()?;
                    conj_mat(&(&c * f.adjoint()), h).transpose().to_owned()
                };
                let mut starts = vec![s.min_vector.clone()];
                if let Some((prev, prev_labels)) = &previous {
                    let mut c = vec![zero(); idx.len()];
                    for (v, lab) in prev.iter().zip(prev_labels) {
                        if let Some(k) = idx.iter().position(|q| q == lab) {
                            c[k] = *v;
                        }
                    }
                    starts.push(c);
                }
                let problem = RatioProblem::new(x, cell_p, None, 1.0, p);
                (problem, starts, idx, None)
            }
        };
        for _ in 0..opts.trials {
            starts.push(random_vector(&mut rng, problem.dim()));
        }
        let mut best = (f64::INFINITY, Vec::new());
        let mut top: f64 = 0.0;
        for s in starts {
            let (val, vec, worst) = problem.descend(s, opts.iterations);
            top = top.max(worst);
            if val < best.0 {
                best = (val, vec);
            }
        }
        lower.push(best.0);
        upper.push(top);
        if last && opts.certify {
            match mode {
                FrameMode::Frame => {
                    let (f, basis, fine_pts) = fine.expect("frame mode keeps the fine atoms");
                    let (bound, res) = frame_certificate(cs, r, &fine_pts, &f, &basis, &best.1, cell_p)?;
                    certified = Some(bound);
                    residual = Some(res);
                }
                FrameMode::Riesz => {
                    if aligned {
                        certified = riesz_certificate(cs, &labels, pitch, r - opts.guard + 3.0, cell_p)?;
                    }
                }
            }
        }
        previous = Some((best.1, labels));
    }
    Ok(ProbeReport {
        p,
        mode,
        method: ProbeMethod::RandomizedDescent,
        radii: opts.radii.clone(),
        verdict: classify(&lower, &upper),
        lower_by_truncation: lower,
        upper_by_truncation: upper,
        certified_lower: certified,
        reconstruction_residual: residual,
    })
}

/// `1 / (s ||K||_Schur)` with `K[μ, λ] = <γ̃_λ, π(μ) g>`, plus the reconstruction
/// residual of the minimizing test function.
fn frame_certificate(
    cs: &CoherentSystem,
    radius: f64,
    fine: &[[f64; 2]],
    fine_atoms: &Mat<c64>,
    basis: &Mat<c64>,
    best: &[c64],
    cell_p: f64,
) -> Result<(f64, f64)> {
    let sub = cs.restrict(radius)?;
    let core = dual_core(&sub, 1e-8)?;
    let h = cs.window.grid().step;
    let k = conj_mat(&(&core.duals * fine_atoms.adjoint()), h).transpose().to_owned();
    let fine_set = PointSet::explicit(
        cs.lattice.spec_arc().clone(),
        *cs.lattice.norm(),
        fine.iter().map(|q| q.to_vec()).collect(),
        radius + 2.0,
    )?;
    if fine_set.len() != fine.len() {
        return Err(Error::InvalidArgument("fine grid exceeds the certificate window".into()));
    }
    let kmat = LocalizedMatrix::new(fine_set, sub.lattice.clone(), k)?;
    let schur = schur_norm(&kmat, 0.0).norm;
    let f: Vec<c64> = (0..basis.ncols()).map(|t| (0..best.len()).map(|n| best[n] * basis[(n, t)]).sum()).collect();
    let signal = Signal::new(cs.window.grid().clone(), f)?;
    let res = core.residual(&signal)?;
    Ok((1.0 / (cell_p * schur), res))
}

/// `s / ||G^{-1}||_Schur` when the fine grid contains the index set.
fn riesz_certificate(cs: &CoherentSystem, idx: &[[f64; 2]], pitch: [f64; 2], extent: f64, cell_p: f64) -> Result<Option<f64>> {
    let on_grid = idx.iter().all(|q| {
        let fx = q[0] / pitch[0];
        let fw = q[1] / pitch[1];
        (fx - fx.round()).abs() < 1e-9 && (fw - fw.round()).abs() < 1e-9 && q[0].abs() <= extent && q[1].abs() <= extent
    });
    if !on_grid {
        return Ok(None);
    }
    let sub = cs.with_lattice(PointSet::explicit(
        cs.lattice.spec_arc().clone(),
        *cs.lattice.norm(),
        idx.iter().map(|q| q.to_vec()).collect(),
        cs.lattice.window_radius(),
    )?)?;
    let g = gram_entries(&sub)?;
    let (vals, vecs) = linalg::hermitian_eigen(linalg::hermitian_part(g.as_ref()).as_ref())?;
    let top = vals.last().copied().unwrap_or(0.0);
    if !(vals[0] > 1e-8 * top) {
        return Ok(None);
    }
    let n = vals.len();
    let scaled = Mat::<c64>::from_fn(n, n, |i, j| vecs[(i, j)] / vals[j]);
    let inv = &scaled * vecs.adjoint();
    let ginv = LocalizedMatrix::new(sub.lattice.clone(), sub.lattice.clone(), inv)?;
    Ok(Some(cell_p / schur_norm(&ginv, 0.0).norm))
}

/// Pseudo-inverse of the frame operator and the resulting dual atoms.
struct DualCore {
    duals: Mat<c64>,
    atoms: Mat<c64>,
    h: f64,
    rank: usize,
    top: f64,
}

impl DualCore {
    fn reconstruct(&self, f: &Signal) -> Vec<c64> {
        // coefficients <f, π(λ) g>, then Σ c_λ γ̃_λ
        let coeffs: Vec<c64> = (0..self.atoms.nrows())
            .map(|l| (0..self.atoms.ncols()).map(|t| f.samples()[t] * self.atoms[(l, t)].conj()).sum::<c64>() * self.h)
            .collect();
        let dt = self.duals.transpose();
        matvec(dt, &coeffs)
    }

    fn residual(&self, f: &Signal) -> Result<f64> {
        let rec = self.reconstruct(f);
        let diff: Vec<c64> = rec.iter().zip(f.samples()).map(|(a, b)| a - b).collect();
        let n = lp_norm(f.samples(), 2.0);
        if n == 0.0 {
            return Err(Error::ZeroWindow);
        }
        Ok(lp_norm(&diff, 2.0) / n)
    }
}

fn dual_core(cs: &CoherentSystem, floor_rel: f64) -> Result<DualCore> {
    let c = cs.atom_matrix()?;
    let h = cs.window.grid().step;
    // S[t, s] = h Σ_λ φ_λ(t) conj(φ_λ(s))
    let s = conj_mat(&(c.adjoint() * &c), h).transpose().to_owned();
    let (vals, vecs) = linalg::hermitian_eigen(linalg::hermitian_part(s.as_ref()).as_ref())?;
    let top = vals.last().copied().unwrap_or(0.0);
    if !(top > 0.0) {
        return Err(Error::Singular);
    }
    let floor = floor_rel * top;
    let m = vals.len();
    let rank = vals.iter().filter(|v| **v > floor).count();
    let scaled = Mat::<c64>::from_fn(m, m, |i, j| if vals[j] > floor { vecs[(i, j)] / vals[j] } else { zero() });
    let s_pinv = &scaled * vecs.adjoint();
    // rows of `duals` are S^+ φ_λ
    let duals = (&s_pinv * c.transpose()).transpose().to_owned();
    Ok(DualCore { duals, atoms: c, h, rank, top })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Regularization {
    /// Fail when the lower frame bound is below the floor.
    #[default]
    None,
    /// Proceed with the floored pseudo-inverse regardless.
    SpectralFloor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualOptions {
    pub regularization: Regularization,
    /// Spectral floor relative to the upper frame bound.
    pub floor_rel: f64,
    /// Dual atoms indexed inside this radius enter the decay fit; default a quarter of the
    /// window, which keeps them clear of boundary modes amplified by the spectral floor.
    pub interior_radius: Option<f64>,
    pub fine_pitch: f64,
    pub bin_width: f64,
    pub guard: f64,
}

impl Default for DualOptions {
    fn default() -> Self {
        Self {
            regularization: Regularization::None,
            floor_rel: 1e-8,
            interior_radius: None,
            fine_pitch: 0.25,
            bin_width: 0.25,
            guard: 2.0,
        }
    }
}

/// Canonical dual frame of a truncated system.
#[derive(Clone, Debug)]
pub struct DualFrame {
    system: CoherentSystem,
    coefficients: LocalizedMatrix,
    dual_atoms: Mat<c64>,
    atoms: Mat<c64>,
    pub decay_fit: DecayFit,
    pub decay_envelope: EnvelopeFunction,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub floor: f64,
    pub retained_rank: usize,
}

impl DualFrame {
    pub fn system(&self) -> &CoherentSystem {
        &self.system
    }

    /// `G^†` as a localized matrix.
    pub fn coefficients(&self) -> &LocalizedMatrix {
        &self.coefficients
    }

    /// Dual atoms as rows.
    pub fn dual_atoms(&self) -> &Mat<c64> {
        &self.dual_atoms
    }

    pub fn dual_atom(&self, i: usize) -> Result<Signal> {
        let row = (0..self.dual_atoms.ncols()).map(|t| self.dual_atoms[(i, t)]).collect();
        Signal::new(self.system.window.grid().clone(), row)
    }

    /// `Σ_λ <f, π(λ) g> γ̃_λ`.
    pub fn reconstruct(&self, f: &Signal) -> Result<Signal> {
        if f.grid() != self.system.window.grid() {
            return Err(Error::IncompatibleGrids);
        }
        let core = DualCore {
            duals: self.dual_atoms.clone(),
            atoms: self.atoms.clone(),
            h: self.system.window.grid().step,
            rank: self.retained_rank,
            top: self.upper_bound,
        };
        Signal::new(f.grid().clone(), core.reconstruct(f))
    }

    /// `||f - reconstruct(f)|| / ||f||`.
    pub fn reconstruction_residual(&self, f: &Signal) -> Result<f64> {
        let rec = self.reconstruct(f)?;
        let diff: Vec<c64> = rec.samples().iter().zip(f.samples()).map(|(a, b)| a - b).collect();
        let n = lp_norm(f.samples(), 2.0);
        if n == 0.0 {
            return Err(Error::ZeroWindow);
        }
        Ok(lp_norm(&diff, 2.0) / n)
    }
}

/// Canonical dual frame `γ̃_λ = S^+ π(λ) g` with `G^† = (<γ̃_λ', γ̃_λ>)`.
///
/// The decay fit uses `|V_g γ̃_γ(μ)|` against `|γ^{-1} μ|` for interior `γ`.
pub fn canonical_dual(cs: &CoherentSystem, opts: &DualOptions) -> Result<DualFrame> {
    let radius = cs.lattice.window_radius();
    let bounds = frame_bounds(cs, FrameMode::Frame, &FrameOptions { radii: vec![radius], guard: opts.guard })?;
    let floor = opts.floor_rel * bounds.upper_bound;
    if bounds.lower_bound <= floor && opts.regularization == Regularization::None {
        return Err(Error::IllConditioned { lower: bounds.lower_bound, floor });
    }
    let core = dual_core(cs, opts.floor_rel)?;
    let h = core.h;
    let gp = conj_mat(&(&core.duals * core.duals.adjoint()), h);
    let coefficients = LocalizedMatrix::new(cs.lattice.clone(), cs.lattice.clone(), gp)?;

    let interior_r = opts.interior_radius.unwrap_or(radius / 4.0);
    let pts = cs.coords();
    let interior: Vec<usize> = (0..pts.len()).filter(|&i| pts[i][0].abs().max(pts[i][1].abs()) <= interior_r).collect();
    if interior.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let fine = fine_points([opts.fine_pitch; 2], radius);
    cs.check_padding(&fine)?;
    let f = atoms_at(&cs.window, &fine)?;
    let di = Mat::<c64>::from_fn(interior.len(), core.duals.ncols(), |i, t| core.duals[(interior[i], t)]);
    // V[μ, i] = <γ̃_i, π(μ) g>
    let v = conj_mat(&(&f * di.adjoint()), h);
    let mut samples = Vec::with_capacity(fine.len() * interior.len());
    for (k, &i) in interior.iter().enumerate() {
        for (m, mu) in fine.iter().enumerate() {
            let d = (mu[0] - pts[i][0]).abs().max((mu[1] - pts[i][1]).abs());
            samples.push((d, v[(m, k)].norm()));
        }
    }
    let decay_envelope = EnvelopeFunction::from_samples(samples, opts.bin_width);
    let decay_fit = decay_envelope.fit_decay();
    Ok(DualFrame {
        system: cs.clone(),
        coefficients,
        dual_atoms: core.duals,
        atoms: core.atoms,
        decay_fit,
        decay_envelope,
        lower_bound: bounds.lower_bound,
        upper_bound: core.top,
        floor,
        retained_rank: core.rank,
    })
}

/// Interior block of `G^†` computed on a truncation enlarged by `guard`.
///
/// Returns the Gramian of `Λ ∩ B_radius` and the matching block of the
/// pseudo-inverse of the Gramian of `Λ ∩ B_{radius + guard}`.
pub fn guarded_gram_pseudo_inverse(cs: &CoherentSystem, radius: f64, guard: f64, floor_rel: f64) -> Result<(LocalizedMatrix, Mat<c64>)> {
    if !(guard >= 0.0) {
        return Err(Error::InvalidArgument("guard must be nonnegative".into()));
    }
    let outer = cs.with_lattice(cs.lattice.with_window(radius + guard)?)?;
    let core = dual_core(&outer, floor_rel)?;
    let pts = outer.coords();
    let keep: Vec<usize> = (0..pts.len())
        .filter(|&i| pointset::inside(pts[i][0].abs().max(pts[i][1].abs()), radius))
        .collect();
    let dk = Mat::<c64>::from_fn(keep.len(), core.duals.ncols(), |i, t| core.duals[(keep[i], t)]);
    let block = conj_mat(&(&dk * dk.adjoint()), core.h);
    let inner = cs.with_lattice(cs.lattice.with_window(radius)?)?;
    if inner.len() != keep.len() {
        return Err(Error::InvalidArgument("interior index sets disagree".into()));
    }
    Ok((gramian(&inner)?, block))
}

/// One row of a dilation sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub r: f64,
    pub density: f64,
    pub lower: f64,
    pub upper: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub mode: FrameMode,
    pub rows: Vec<SweepRow>,
    /// Adjacent lower bounds differ by at most a quarter of the larger one.
    pub continuous: bool,
    /// When the undilated system has `A > 0`, so do all rows with `|r - 1| <= 0.05`.
    pub persistent: bool,
}

/// `frame_bounds(D_r(Λ))` for each `r`, truncated at the original window.
pub fn deformation_sweep(cs: &CoherentSystem, r_values: &[f64], mode: FrameMode, opts: &FrameOptions) -> Result<SweepReport> {
    if r_values.is_empty() {
        return Err(Error::InvalidArgument("empty r grid".into()));
    }
    if let Some(r) = r_values.iter().find(|r| !(**r >= 0.8 - 1e-12 && **r <= 1.25 + 1e-12)) {
        return Err(Error::InvalidArgument(format!("r = {r} outside [0.8, 1.25]")));
    }
    let window_r = cs.lattice.window_radius();
    let rows: Vec<Result<SweepRow>> = r_values
        .par_iter()
        .map(|&r| {
            let lattice = if r == 1.0 {
                cs.lattice.clone()
            } else {
                let wider = cs.lattice.with_window(window_r / r + 1.0)?;
                dilate_set(&wider, r)?.restrict(window_r)?
            };
            let sys = cs.with_lattice(lattice)?;
            let rep = frame_bounds(&sys, mode, opts)?;
            let density = match sys.lattice.expected_density() {
                Some(d) => d,
                None => {
                    let radii = [window_r / 4.0, window_r / 2.0];
                    let est = pointset::beurling_density(sys.lattice(), &radii, Default::default())?;
                    0.5 * (est.lower + est.upper)
                }
            };
            Ok(SweepRow { r, density, lower: rep.lower_bound, upper: rep.upper_bound, ratio: rep.ratio() })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let continuous = rows
        .windows(2)
        .all(|w| (w[1].lower - w[0].lower).abs() <= 0.25 * w[0].lower.max(w[1].lower) + 1e-12);
    let base = rows.iter().find(|row| row.r == 1.0).map(|row| row.lower);
    let persistent = match base {
        Some(a1) if a1 > 0.0 => rows.iter().filter(|row| (row.r - 1.0).abs() <= 0.05 + 1e-12).all(|row| row.lower > 0.0),
        _ => true,
    };
    Ok(SweepReport { mode, rows, continuous, persistent })
}
