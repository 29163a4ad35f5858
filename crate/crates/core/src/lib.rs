//! Numerical toolkit for coherent systems on homogeneous nilpotent Lie groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`]: graded nilpotent groups in exponential coordinates, homogeneous
//!   norms, dilations and central quotients.
//! * [`pointset`]: discrete subsets with separation, relative density and
//!   Beurling density estimates.
//! * [`heisenberg`]: the Schrödinger representation on sampled signals, the
//!   short-time Fourier transform and orthogonality checks.
//! * [`schur`]: localized matrices, Schur norms, envelopes, partitions of unity
//!   and the idempotent lift.
//! * [`frame`]: frame and Riesz bounds of Gabor systems, p-norm probes,
//!   canonical duals and deformation sweeps.

pub mod error;
pub mod frame;
pub mod group;
pub mod heisenberg;
pub mod linalg;
pub mod pointset;
pub mod schur;

pub use error::{Error, Result};
pub use faer::c64;
pub use group::{GroupElement, GroupSpec, HomogeneousNorm};
pub use pointset::PointSet;
