//! Dense and matrix-free linear algebra helpers on top of `faer`.

use faer::{Mat, MatRef, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::c64;
use crate::error::{Error, Result};

/// Eigenvalues (nondecreasing) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: MatRef<'_, c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let e = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigen)?;
    let vals = e.S().column_vector().iter().map(|z| z.re).collect();
    Ok((vals, e.U().to_owned()))
}

/// Eigenvalues (nondecreasing) of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    m.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::Eigen)
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    m.singular_values().map_err(|_| Error::Eigen)
}

/// Hermitian part `(m + m*) / 2`, used to clean rounding asymmetry.
pub fn hermitian_part(m: MatRef<'_, c64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// Largest absolute entry.
pub fn max_abs(m: MatRef<'_, c64>) -> f64 {
    let mut best: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

/// Matrix-vector product `m v`.
pub fn matvec(m: MatRef<'_, c64>, v: &[c64]) -> Vec<c64> {
    let mut out = vec![c64::new(0.0, 0.0); m.nrows()];
    for j in 0..m.ncols() {
        let vj = v[j];
        if vj == c64::new(0.0, 0.0) {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += m[(i, j)] * vj;
        }
    }
    out
}

/// `l^p` norm of a complex vector, `p` in `[1, inf]`.
pub fn lp_norm(v: &[c64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    } else if p == 2.0 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    } else if p == 1.0 {
        v.iter().map(|z| z.norm()).sum()
    } else {
        v.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Inverse of a small real square matrix by Gauss-Jordan elimination.
pub fn invert_small(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    let scale = a.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))
            .expect("nonempty");
        if m[p][c].abs() <= 1e-13 * scale {
            return Err(Error::Singular);
        }
        m.swap(c, p);
        let inv = 1.0 / m[c][c];
        m[c].iter_mut().for_each(|v| *v *= inv);
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    let pivot = m[c].clone();
                    for (x, y) in m[r].iter_mut().zip(&pivot) {
                        *x -= f * y;
                    }
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Sparse Hermitian matrix stored by rows.
#[derive(Clone, Debug, Default)]
pub struct SparseHermitian {
    pub n: usize,
    pub rows: Vec<Vec<(usize, c64)>>,
}

impl SparseHermitian {
    pub fn apply(&self, v: &[c64], out: &mut [c64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            let mut acc = c64::new(0.0, 0.0);
            for &(j, a) in row {
                acc += a * v[j];
            }
            *o = acc;
        }
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let mut m = Mat::<c64>::zeros(self.n, self.n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                m[(i, j)] = a;
            }
        }
        m
    }
}

/// Stopping rules for [`lanczos_extremes`].
#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    pub max_iter: usize,
    /// Residual tolerance relative to the largest Ritz value.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { max_iter: 1500, tol: 1e-10, seed: 0x5eed }
    }
}

/// Extreme eigenpairs of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct ExtremeEigen {
    pub min: f64,
    pub max: f64,
    pub min_vector: Vec<c64>,
    pub iterations: usize,
    pub converged: bool,
}

const STALL_RESIDUAL: f64 = 1e-4;
const STALL_STEP: f64 = 1e-12;

/// Smallest and largest eigenvalue of a Hermitian operator of size `n` given
/// only through its action, by Lanczos with full reorthogonalization.

pub fn lanczos_extremes(
    n: usize,
    op: impl Fn(&[c64], &mut [c64]),
    opts: LanczosOptions,
) -> Result<ExtremeEigen> {
    if n == 0 {
        return Err(Error::InvalidArgument("empty operator".into()));
    }
    let zero = c64::new(0.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut q: Vec<c64> = (0..n)
        .map(|_| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let nrm = lp_norm(&q, 2.0);
    q.iter_mut().for_each(|z| *z /= nrm);

    let kmax = opts.max_iter.min(n);
    let mut basis: Vec<Vec<c64>> = Vec::with_capacity(kmax);
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![zero; n];
    let mut converged = false;
    let mut result = (0.0, 0.0, Vec::new(), Vec::new());

    for k in 0..kmax {
        basis.push(q.clone());
        op(&q, &mut w);
        let a: f64 = q.iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum();
        alpha.push(a);
        for (wi, qi) in w.iter_mut().zip(&q) {
            *wi -= qi * a;
        }
        if k > 0 {
            let b = beta[k - 1];
            for (wi, pi) in w.iter_mut().zip(&basis[k - 1]) {
                *wi -= pi * b;
            }
        }
        for _ in 0..2 {
            for v in &basis {
                let c: c64 = v.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= vi * c;
                }
            }
        }
        let b = lp_norm(&w, 2.0);
        let last = k + 1 == kmax || b < 1e-13 * alpha.iter().fold(1e-300, |m: f64, v| m.max(v.abs()));
        if (k + 1) % 10 == 0 || last {
            let (lo, slo) = tridiagonal_extreme(&alpha, &beta, false);
            let (hi, shi) = tridiagonal_extreme(&alpha, &beta, true);
            let scale = hi.abs().max(lo.abs()).max(1e-300);
            let rlo = b * slo.last().map_or(0.0, |v| v.abs());
            let rhi = b * shi.last().map_or(0.0, |v| v.abs());
            // Extreme Ritz values are monotone in k; a stalled value with a moderate
            // residual is accepted even when clustering keeps the residual large.
            let settled = |r: f64, now: f64, before: f64| {
                r <= opts.tol * scale || (r <= STALL_RESIDUAL * scale && (now - before).abs() <= STALL_STEP * scale)
            };
            let ok = k >= 10 && settled(rlo, lo, result.0) && settled(rhi, hi, result.1);
            result = (lo, hi, slo, shi);
            if ok || b < 1e-13 * scale {
                converged = true;
                break;
            }
            if last {
                break;
            }
        }
        beta.push(b);
        q = w.iter().map(|z| z / b).collect();
    }
    let (min, max, s, _) = result;
    let mut min_vector = vec![zero; n];
    for (coef, v) in s.iter().zip(&basis) {
        for (m, x) in min_vector.iter_mut().zip(v) {
            *m += x * *coef;
        }
    }
    Ok(ExtremeEigen { min, max, min_vector, iterations: alpha.len(), converged })
}

/// Extreme eigenvalue of the symmetric tridiagonal matrix `(alpha, beta)` by
/// Sturm bisection, with its unit eigenvector from inverse iteration.
fn tridiagonal_extreme(alpha: &[f64], beta: &[f64], largest: bool) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = (if i > 0 { beta[i - 1].abs() } else { 0.0 }) + (if i + 1 < k { beta[i].abs() } else { 0.0 });
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    // number of eigenvalues strictly below x
    let count = |x: f64| {
        let mut c = 0;
        let mut d = 1.0;
        for i in 0..k {
            let b2 = if i > 0 { beta[i - 1] * beta[i - 1] } else { 0.0 };
            d = alpha[i] - x - if i > 0 { b2 / d } else { 0.0 };
            if d == 0.0 {
                d = -1e-300;
            }
            if d < 0.0 {
                c += 1;
            }
        }
        c
    };
    let target = if largest { k - 1 } else { 0 };
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if count(m) > target {
            b = m;
        } else {
            a = m;
        }
    }
    let theta = 0.5 * (a + b);

    // inverse iteration on T - (theta + tiny) I
    let shift = theta + (hi - lo).abs().max(1e-300) * 1e-14 * if largest { 1.0 } else { -1.0 };
    let mut x = vec![1.0; k];
    for _ in 0..3 {
        x = solve_tridiagonal(alpha, beta, shift, &x);
        let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(nrm > 0.0) || !nrm.is_finite() {
            x = vec![0.0; k];
            x[k - 1] = 1.0;
            break;
        }
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    (theta, x)
}

fn solve_tridiagonal(alpha: &[f64], beta: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let k = alpha.len();
    let mut c = vec![0.0; k];
    let mut d = vec![0.0; k];
    let mut denom = alpha[0] - shift;
    if denom == 0.0 {
        denom = 1e-300;
    }
    if k > 1 {
        c[0] = beta[0] / denom;
    }
    d[0] = rhs[0] / denom;
    for i in 1..k {
        let mut m = alpha[i] - shift - beta[i - 1] * c[i - 1];
        if m == 0.0 {
            m = 1e-300;
        }
        if i + 1 < k {
            c[i] = beta[i] / m;
        }
        d[i] = (rhs[i] - beta[i - 1] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; k];
    x[k - 1] = d[k - 1];
    for i in (0..k - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lanczos_matches_dense() {
        let n = 120;
        let m = Mat::<c64>::from_fn(n, n, |i, j| {
            let d = i as f64 - j as f64;
            let re = (-d * d / 20.0).exp();
            let im = if i == j { 0.0 } else { 0.1 * d.signum() * (-d.abs()).exp() };
            c64::new(re, im)
        });
        let dense = hermitian_eigenvalues(m.as_ref()).unwrap();
        let r = lanczos_extremes(n, |v, out| out.copy_from_slice(&matvec(m.as_ref(), v)), LanczosOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.min - dense[0]).abs() < 1e-8 * dense[n - 1], "{} {}", r.min, dense[0]);
        assert!((r.max - dense[n - 1]).abs() < 1e-8 * dense[n - 1]);
        // Rayleigh quotient of the returned vector reproduces the minimum
        let mv = matvec(m.as_ref(), &r.min_vector);
        let rq: f64 = r.min_vector.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum();
        assert!((rq - dense[0]).abs() < 1e-7 * dense[n - 1]);
    }

    #[test]
    fn small_inverse() {
        let a = vec![vec![2.0, 1.0], vec![0.0, 0.5]];
        let inv = invert_small(&a).unwrap();
        assert!((inv[0][0] - 0.5).abs() < 1e-15);
        assert!((inv[0][1] + 1.0).abs() < 1e-15);
        assert!((inv[1][1] - 2.0).abs() < 1e-15);
        assert!(invert_small(&[vec![1.0, 2.0], vec![2.0, 4.0]]).is_err());
    }
}
