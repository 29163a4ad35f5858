//! Localized matrices indexed by point sets and the tools that control them:
//! weighted Schur norms, radial envelopes, amalgam norms, the envelope product
//! bound, smooth partitions of unity and the idempotent lift to `G x R`.

mod amalgam;
mod envelope;
mod lift;
mod partition;

use faer::Mat;
use rayon::prelude::*;

use crate::c64;
use crate::error::{Error, Result};
use crate::linalg;
use crate::pointset::PointSet;

pub use amalgam::{amalgam_norms, envelope_product, AmalgamGrid, AmalgamReport, EnvelopeProduct, ProductOptions};
pub use envelope::{eta, DecayFit, EnvelopeFunction};
pub use lift::{lift_idempotent, LiftCheck, LiftedMatrix};
pub use partition::{partition_of_unity, PartitionOfUnity};

/// Envelope attached to a matrix, with the result of checking it entrywise.
#[derive(Clone, Debug)]
pub struct AttachedEnvelope {
    pub function: EnvelopeFunction,
    pub verified: bool,
}

/// A complex matrix whose rows and columns are labelled by points of the same group.
#[derive(Clone, Debug)]
pub struct LocalizedMatrix {
    rows: PointSet,
    cols: PointSet,
    entries: Mat<c64>,
    envelope: Option<AttachedEnvelope>,
}

impl LocalizedMatrix {
    pub fn new(rows: PointSet, cols: PointSet, entries: Mat<c64>) -> Result<Self> {
        if entries.nrows() != rows.len() || entries.ncols() != cols.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len() * cols.len(),
                got: entries.nrows() * entries.ncols(),
            });
        }
        if rows.spec().dim() != cols.spec().dim() {
            return Err(Error::DimensionMismatch { expected: rows.spec().dim(), got: cols.spec().dim() });
        }
        Ok(Self { rows, cols, entries, envelope: None })
    }

    pub fn identity(points: PointSet) -> Self {
        let n = points.len();
        Self { rows: points.clone(), cols: points, entries: Mat::identity(n, n), envelope: None }
    }

    pub fn rows(&self) -> &PointSet {
        &self.rows
    }

    pub fn cols(&self) -> &PointSet {
        &self.cols
    }

    pub fn entries(&self) -> &Mat<c64> {
        &self.entries
    }

    pub fn into_entries(self) -> Mat<c64> {
        self.entries
    }

    pub fn envelope(&self) -> Option<&AttachedEnvelope> {
        self.envelope.as_ref()
    }

    /// Attaches an envelope and records whether it dominates every entry
    /// (with `1e-12` absolute slack).
    pub fn attach_envelope(&mut self, function: EnvelopeFunction) -> bool {
        let verified = self.dominated_by(&function);
        self.envelope = Some(AttachedEnvelope { function, verified });
        verified
    }

    fn dominated_by(&self, f: &EnvelopeFunction) -> bool {
        (0..self.rows.len()).into_par_iter().all(|i| {
            (0..self.cols.len()).all(|j| self.entries[(i, j)].norm() <= f.eval(self.distance(i, j)) + 1e-12)
        })
    }

    /// `|row_i^{-1} col_j|` in the row set's norm.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.rows
            .spec()
            .distance(self.rows.norm(), self.rows.points()[i].coords(), self.cols.points()[j].coords())
    }

    pub fn adjoint(&self) -> LocalizedMatrix {
        LocalizedMatrix {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            entries: self.entries.adjoint().to_owned(),
            envelope: None,
        }
    }

    /// Matrix product; the column set of `self` must be the row set of `other`.
    pub fn matmul(&self, other: &LocalizedMatrix) -> Result<LocalizedMatrix> {
        if self.cols.len() != other.rows.len() {
            return Err(Error::DimensionMismatch { expected: self.cols.len(), got: other.rows.len() });
        }
        Ok(LocalizedMatrix {
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            entries: &self.entries * &other.entries,
            envelope: None,
        })
    }

    /// Spectral norm estimate by power iteration on `A* A` (a lower estimate).
    pub fn operator_norm_estimate(&self, iterations: usize) -> f64 {
        let n = self.entries.ncols();
        if n == 0 || self.entries.nrows() == 0 {
            return 0.0;
        }
        let mut v: Vec<c64> = (0..n).map(|i| c64::new(1.0 + (i as f64 * 0.7).sin() * 0.3, (i as f64 * 1.3).cos() * 0.3)).collect();
        let mut est = 0.0;
        let adj = self.entries.adjoint().to_owned();
        for _ in 0..iterations {
            let nv = linalg::lp_norm(&v, 2.0);
            if nv == 0.0 {
                return 0.0;
            }
            v.iter_mut().for_each(|z| *z /= nv);
            let av = linalg::matvec(self.entries.as_ref(), &v);
            est = linalg::lp_norm(&av, 2.0);
            v = linalg::matvec(adj.as_ref(), &av);
        }
        est
    }
}

/// Weighted row and column sums of a localized matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchurNormReport {
    pub row_sum_sup: f64,
    pub col_sum_sup: f64,
    pub norm: f64,
    pub alpha: f64,
}

/// `max(sup_i sum_j v(i,j)|A_ij|, sup_j sum_i v(i,j)|A_ij|)` with `v = (1 + |λ^{-1}γ|)^α`.
pub fn schur_norm(a: &LocalizedMatrix, alpha: f64) -> SchurNormReport {
    let (m, n) = (a.entries.nrows(), a.entries.ncols());
    let weighted: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = a.entries[(i, j)].norm();
                    if e == 0.0 || alpha == 0.0 {
                        e
                    } else {
                        e * (1.0 + a.distance(i, j)).powf(alpha)
                    }
                })
                .collect()
        })
        .collect();
    let row = weighted.iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max);
    let mut cols = vec![0.0; n];
    for r in &weighted {
        for (c, v) in cols.iter_mut().zip(r) {
            *c += v;
        }
    }
    let col = cols.into_iter().fold(0.0, f64::max);
    SchurNormReport { row_sum_sup: row, col_sum_sup: col, norm: row.max(col), alpha }
}

/// Smallest nonincreasing radial majorant of `|A|` over distance bins of width
/// `bin_width`; attaches it to `a` (always verified, tight at the largest entry).
pub fn build_envelope(a: &mut LocalizedMatrix, bin_width: f64) -> EnvelopeFunction {
    let (m, n) = (a.entries.nrows(), a.entries.ncols());
    let samples: Vec<(f64, f64)> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            let a = &*a;
            (0..n).map(move |j| (a.distance(i, j), a.entries[(i, j)].norm()))
        })
        .collect();
    let f = EnvelopeFunction::from_samples(samples, bin_width);
    a.envelope = Some(AttachedEnvelope { function: f.clone(), verified: true });
    f
}

/// Options for [`inverse_decay_experiment`].
#[derive(Clone, Debug)]
pub struct InverseDecayOptions {
    pub alpha: f64,
    pub bin_width: f64,
    /// Eigenvalues below `floor_rel * max|eigenvalue|` are treated as zero.
    pub floor_rel: f64,
    /// A precomputed pseudo-inverse to analyse instead of the eigen-based one.
    pub pseudo_inverse: Option<Mat<c64>>,
}

impl InverseDecayOptions {
    /// Weight exponent `Q + 1` for the group of `a`.
    pub fn for_matrix(a: &LocalizedMatrix) -> Self {
        Self {
            alpha: a.rows().spec().homogeneous_dimension() + 1.0,
            bin_width: 0.5,
            floor_rel: 1e-8,
            pseudo_inverse: None,
        }
    }
}

/// Decay of a matrix and of its (pseudo-)inverse.
#[derive(Clone, Debug)]
pub struct InverseDecayReport {
    pub s_in: f64,
    pub s_out: f64,
    pub envelope_in: EnvelopeFunction,
    pub envelope_out: EnvelopeFunction,
    pub min_abs_eigenvalue: f64,
    pub pseudo_inverse_used: bool,
    /// `s_out > 0` whenever `s_in > α + Q`.
    pub assertion_holds: bool,
}

pub fn inverse_decay_experiment(a: &LocalizedMatrix, opts: &InverseDecayOptions) -> Result<InverseDecayReport> {
    let n = a.entries.nrows();
    if n != a.entries.ncols() || n == 0 {
        return Err(Error::InvalidArgument("inverse decay needs a nonempty square matrix".into()));
    }
    let herm = linalg::hermitian_part(a.entries.as_ref());
    let asym = linalg::max_abs((&herm - &a.entries).as_ref());
    if asym > 1e-10 * linalg::max_abs(a.entries.as_ref()).max(1e-300) {
        return Err(Error::InvalidArgument("matrix is not Hermitian".into()));
    }
    let (vals, vecs) = linalg::hermitian_eigen(herm.as_ref())?;
    let top = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let floor = opts.floor_rel * top;
    let min_abs = vals.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if top == 0.0 || vals.iter().all(|v| v.abs() <= floor) {
        return Err(Error::Singular);
    }
    let pseudo = min_abs <= floor;
    let inv = match &opts.pseudo_inverse {
        Some(p) => {
            if p.nrows() != n || p.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.nrows() });
            }
            p.clone()
        }
        None => {
            let scaled = Mat::<c64>::from_fn(n, n, |i, k| {
                if vals[k].abs() > floor {
                    vecs[(i, k)] / vals[k]
                } else {
                    c64::new(0.0, 0.0)
                }
            });
            &scaled * vecs.adjoint()
        }
    };
    let mut a_in = a.clone();
    let env_in = build_envelope(&mut a_in, opts.bin_width);
    let mut a_out = LocalizedMatrix::new(a.rows.clone(), a.cols.clone(), inv)?;
    let env_out = build_envelope(&mut a_out, opts.bin_width);
    let s_in = env_in.fit_decay().exponent;
    let s_out = env_out.fit_decay().exponent;
    let q = a.rows.spec().homogeneous_dimension();
    let assertion_holds = !(s_in > opts.alpha + q) || s_out > 0.0;
    Ok(InverseDecayReport {
        s_in,
        s_out,
        envelope_in: env_in,
        envelope_out: env_out,
        min_abs_eigenvalue: min_abs,
        pseudo_inverse_used: pseudo || opts.pseudo_inverse.is_some(),
        assertion_holds,
    })
}
