//! Graded nilpotent Lie groups in exponential coordinates.
//!
//! A group is described by its Lie algebra: a basis `e_1, ..., e_n`, integer
//! dilation weights and structure constants `[e_i, e_j] = sum_k c_ij^k e_k`.
//! Group multiplication is the Baker-Campbell-Hausdorff series, which terminates
//! at the nilpotency step. Haar measure is Lebesgue measure in these coordinates.

mod bch;
mod norm;

use std::cell::RefCell;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use bch::{BchTable, Letter};

pub use norm::{HomogeneousNorm, VolumeEstimate};

/// Largest nilpotency step for which the BCH table is generated.
pub const MAX_STEP: usize = 6;

/// One structure constant `[e_i, e_j] = value * e_k + ...` with `i < j` (0-based).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureConstant {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

/// A point of the group in exponential coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    coords: Vec<f64>,
}

impl GroupElement {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn identity(dim: usize) -> Self {
        Self { coords: vec![0.0; dim] }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl From<Vec<f64>> for GroupElement {
    fn from(coords: Vec<f64>) -> Self {
        Self { coords }
    }
}

impl AsRef<[f64]> for GroupElement {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

/// A homogeneous group: graded nilpotent Lie algebra plus its dilation weights.
#[derive(Clone)]
pub struct GroupSpec {
    name: String,
    dim: usize,
    step: usize,
    weights: Vec<u32>,
    inv_weights: Vec<f64>,
    brackets: Vec<StructureConstant>,
    center: Vec<usize>,
    bch: BchTable,
    sort_axis: Option<usize>,
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("step", &self.step)
            .field("weights", &self.weights)
            .field("brackets", &self.brackets)
            .field("center", &self.center)
            .finish()
    }
}

thread_local! {
    static SCRATCH: RefCell<Vec<f64>> = const { RefCell::new(Vec::new()) };
}

impl GroupSpec {
    /// Builds and validates a group.
    ///
    /// `brackets` holds 0-based triples `(i, j, k, c)` meaning `[e_i, e_j]` has
    /// component `c` along `e_k`. Antisymmetric partners are filled in; a triple and
    /// its partner given with inconsistent values is rejected. When `center` is
    /// `None` the coordinate-aligned center is computed.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        step: usize,
        weights: Vec<u32>,
        brackets: &[(usize, usize, usize, f64)],
        center: Option<Vec<usize>>,
    ) -> Result<Self> {
        if step > MAX_STEP {
            return Err(Error::StepTooLarge(step));
        }
        if weights.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: weights.len() });
        }
        if dim > 0 && step == 0 {
            return Err(Error::InvalidGroup("step must be at least 1".into()));
        }
        if weights.iter().any(|&w| w == 0) {
            return Err(Error::InvalidGroup("weights must be positive integers".into()));
        }
        if dim > 0 && weights.iter().copied().min() != Some(1) {
            return Err(Error::InvalidGroup("smallest weight must be 1".into()));
        }

        let mut merged: Vec<StructureConstant> = Vec::new();
        for &(i, j, k, c) in brackets {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidGroup(format!("bracket index out of range: ({i}, {j}, {k})")));
            }
            if c == 0.0 {
                continue;
            }
            if !c.is_finite() {
                return Err(Error::InvalidGroup("non-finite structure constant".into()));
            }
            if i == j {
                return Err(Error::InvalidGroup(format!("[e{i}, e{i}] must vanish")));
            }
            let (i, j, c) = if i < j { (i, j, c) } else { (j, i, -c) };
            if let Some(prev) = merged.iter().find(|s| s.i == i && s.j == j && s.k == k) {
                if (prev.value - c).abs() > 1e-12 * c.abs().max(1.0) {
                    return Err(Error::InvalidGroup(format!(
                        "conflicting values for [e{i}, e{j}] along e{k}"
                    )));
                }
                continue;
            }
            merged.push(StructureConstant { i, j, k, value: c });
        }
        merged.sort_by_key(|s| (s.i, s.j, s.k));

        for s in &merged {
            if weights[s.i] + weights[s.j] != weights[s.k] {
                return Err(Error::InvalidGroup(format!(
                    "bracket [e{}, e{}] -> e{} violates the grading",
                    s.i, s.j, s.k
                )));
            }
        }

        let mut spec = Self {
            name: name.into(),
            dim,
            step,
            inv_weights: weights.iter().map(|&w| 1.0 / w as f64).collect(),
            weights,
            brackets: merged,
            center: Vec::new(),
            bch: BchTable::new(step.max(1)),
            sort_axis: None,
        };
        spec.sort_axis = spec.weights.iter().position(|&w| w == 1);

        let jac = spec.jacobi_residual();
        let scale = spec.brackets.iter().map(|s| s.value.abs()).fold(1.0, f64::max);
        if jac > 1e-12 * scale * scale {
            return Err(Error::InvalidGroup(format!("Jacobi identity fails (residual {jac:.3e})")));
        }
        let actual = spec.nilpotency_step();
        if actual > step {
            return Err(Error::InvalidGroup(format!(
                "declared step {step} but brackets of length {} do not vanish",
                step + 1
            )));
        }

        let aligned = spec.coordinate_center();
        spec.center = match center {
            Some(mut c) => {
                c.sort_unstable();
                c.dedup();
                for &idx in &c {
                    if idx >= dim {
                        return Err(Error::InvalidGroup(format!("center index {idx} out of range")));
                    }
                    if !aligned.contains(&idx) {
                        return Err(Error::NotCentral(idx));
                    }
                }
                c
            }
            None => aligned,
        };
        Ok(spec)
    }

    /// Euclidean space `R^n` with all weights equal to one.
    pub fn abelian(n: usize) -> Self {
        Self::new(format!("R^{n}"), n, 1, vec![1; n], &[], None).expect("abelian group is valid")
    }

    /// Heisenberg group `H^d` with coordinates `(x_1..x_d, w_1..w_d, z)` and
    /// `[e_i, e_{d+i}] = e_{2d+1}`.
    pub fn heisenberg(d: usize) -> Self {
        assert!(d >= 1, "Heisenberg group needs d >= 1");
        let mut weights = vec![1; 2 * d];
        weights.push(2);
        let br: Vec<_> = (0..d).map(|i| (i, d + i, 2 * d, 1.0)).collect();
        Self::new(format!("H^{d}"), 2 * d + 1, 2, weights, &br, None).expect("Heisenberg group is valid")
    }

    /// Free step-2 nilpotent group on three generators (dimension 6).
    pub fn free_step2_rank3() -> Self {
        let br = [(0, 1, 3, 1.0), (0, 2, 4, 1.0), (1, 2, 5, 1.0)];
        Self::new("N(3,2)", 6, 2, vec![1, 1, 1, 2, 2, 2], &br, None).expect("free group is valid")
    }

    /// Four-dimensional Engel (filiform) group: `[e1, e2] = e3`, `[e1, e3] = e4`.
    pub fn engel() -> Self {
        let br = [(0, 1, 2, 1.0), (0, 2, 3, 1.0)];
        Self::new("Engel", 4, 3, vec![1, 1, 2, 3], &br, None).expect("Engel group is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub(crate) fn inv_weights(&self) -> &[f64] {
        &self.inv_weights
    }

    /// Homogeneous dimension `Q = sum of weights`.
    pub fn homogeneous_dimension(&self) -> f64 {
        self.weights.iter().map(|&w| w as f64).sum()
    }

    pub fn brackets(&self) -> &[StructureConstant] {
        &self.brackets
    }

    /// Indices of the central coordinates used for quotients.
    pub fn center(&self) -> &[usize] {
        &self.center
    }

    pub fn is_abelian(&self) -> bool {
        self.brackets.is_empty()
    }

    /// A weight-one coordinate. For any homogeneous norm used here,
    /// `|x^{-1} y| >= |y_a - x_a|` along this axis, which allows sorted pruning.
    pub fn sort_axis(&self) -> Option<usize> {
        self.sort_axis
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.dim)
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        self.brackets
            .iter()
            .find(|s| s.i == a && s.j == b && s.k == k)
            .map_or(0.0, |s| sign * s.value)
    }

    /// Lie bracket of two algebra elements.
    pub fn bracket_into(&self, u: &[f64], v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for s in &self.brackets {
            out[s.k] += s.value * (u[s.i] * v[s.j] - u[s.j] * v[s.i]);
        }
    }

    pub fn bracket(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.bracket_into(u, v, &mut out);
        out
    }

    /// Largest violation of the Jacobi identity over basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let e = |i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        };
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    let (ea, eb, ec) = (e(a), e(b), e(c));
                    let t1 = self.bracket(&ea, &self.bracket(&eb, &ec));
                    let t2 = self.bracket(&eb, &self.bracket(&ec, &ea));
                    let t3 = self.bracket(&ec, &self.bracket(&ea, &eb));
                    for k in 0..n {
                        worst = worst.max((t1[k] + t2[k] + t3[k]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Length of the lower central series: smallest `s` with `g^{(s+1)} = 0`.
    pub fn nilpotency_step(&self) -> usize {
        if self.dim == 0 {
            return 0;
        }
        let n = self.dim;
        let mut layer: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                v
            })
            .collect();
        let mut s = 1;
        loop {
            let mut next = Vec::new();
            for a in 0..n {
                let mut ea = vec![0.0; n];
                ea[a] = 1.0;
                for v in &layer {
                    next.push(self.bracket(&ea, v));
                }
            }
            let basis = row_basis(next, 1e-10);
            if basis.is_empty() {
                return s;
            }
            s += 1;
            if s > n + 1 {
                // cannot happen for a nilpotent algebra
                return s;
            }
            layer = basis;
        }
    }

    /// Coordinates `c` with `[e_c, e_j] = 0` for all `j`.
    pub fn coordinate_center(&self) -> Vec<usize> {
        (0..self.dim)
            .filter(|&c| !self.brackets.iter().any(|s| s.i == c || s.j == c))
            .collect()
    }

    /// Group product in exponential coordinates, written into `out`.
    pub fn multiply_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for k in 0..self.dim {
            out[k] = x[k] + y[k];
        }
        if self.brackets.is_empty() {
            return;
        }
        if self.step <= 2 {
            for s in &self.brackets {
                out[s.k] += 0.5 * s.value * (x[s.i] * y[s.j] - x[s.j] * y[s.i]);
            }
            return;
        }
        SCRATCH.with(|cell| {
            let mut buf = cell.borrow_mut();
            let n = self.dim;
            buf.resize(2 * n, 0.0);
            let (acc, tmp) = buf.split_at_mut(n);
            for term in &self.bch.terms {
                if term.word.len() < 2 {
                    continue;
                }
                let last = term.word.len() - 1;
                let pick = |l: Letter| if l == Letter::X { x } else { y };
                acc.copy_from_slice(pick(term.word[last]));
                for &l in term.word[..last].iter().rev() {
                    self.bracket_into(pick(l), acc, tmp);
                    acc.copy_from_slice(tmp);
                }
                for k in 0..n {
                    out[k] += term.coeff * acc[k];
                }
            }
        });
    }

    pub fn multiply(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        let mut out = vec![0.0; self.dim];
        self.multiply_into(&x.coords, &y.coords, &mut out);
        GroupElement::new(out)
    }

    /// In exponential coordinates the inverse is negation.
    pub fn inverse(&self, x: &GroupElement) -> GroupElement {
        GroupElement::new(x.coords.iter().map(|v| -v).collect())
    }

    /// `x^{-1} y` written into `out`.
    pub fn left_quotient_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        SCRATCH_NEG.with(|cell| {
            let mut neg = cell.borrow_mut();
            neg.clear();
            neg.extend(x.iter().map(|v| -v));
            self.multiply_into(&neg, y, out);
        });
    }

    /// `x y^{-1}` written into `out`.
    pub fn right_quotient_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        SCRATCH_NEG.with(|cell| {
            let mut neg = cell.borrow_mut();
            neg.clear();
            neg.extend(y.iter().map(|v| -v));
            self.multiply_into(x, &neg, out);
        });
    }

    /// Dilation `D_r x = (r^{w_1} x_1, ..., r^{w_n} x_n)`. `r = 1` returns `x` unchanged.
    pub fn dilate(&self, x: &GroupElement, r: f64) -> Result<GroupElement> {
        let mut out = x.clone();
        self.dilate_in_place(out.coords_mut(), r)?;
        Ok(out)
    }

    pub fn dilate_in_place(&self, x: &mut [f64], r: f64) -> Result<()> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::NonPositiveScale(r));
        }
        if r == 1.0 {
            return Ok(());
        }
        for (v, &w) in x.iter_mut().zip(&self.weights) {
            *v *= r.powi(w as i32);
        }
        Ok(())
    }

    /// Homogeneous norm of `x`.
    pub fn hnorm(&self, norm: &HomogeneousNorm, x: &[f64]) -> f64 {
        norm.eval(self, x)
    }

    /// Left-invariant quasi-distance `|x^{-1} y|`.
    pub fn distance(&self, norm: &HomogeneousNorm, x: &[f64], y: &[f64]) -> f64 {
        SCRATCH_DIST.with(|cell| {
            let mut buf = cell.borrow_mut();
            buf.resize(self.dim, 0.0);
            self.left_quotient_into(x, y, &mut buf);
            norm.eval(self, &buf)
        })
    }

    /// Right-invariant quasi-distance `|x y^{-1}|`.
    pub fn right_distance(&self, norm: &HomogeneousNorm, x: &[f64], y: &[f64]) -> f64 {
        SCRATCH_DIST.with(|cell| {
            let mut buf = cell.borrow_mut();
            buf.resize(self.dim, 0.0);
            self.right_quotient_into(x, y, &mut buf);
            norm.eval(self, &buf)
        })
    }

    /// Haar volume of the ball of radius `radius`.
    ///
    /// Exact for the weighted-max norm. Other norms use Monte Carlo sampling in
    /// the cube `[-1, 1]^n` (which contains the unit ball) with the given generator.
    pub fn ball_volume<R: Rng + ?Sized>(
        &self,
        norm: &HomogeneousNorm,
        radius: f64,
        rng: &mut R,
        samples: usize,
    ) -> Result<VolumeEstimate> {
        norm::ball_volume(self, norm, radius, rng, samples)
    }

    /// Largest observed ratio `|xy| / (|x| + |y|)` over random pairs.
    pub fn quasi_triangle_constant<R: Rng + ?Sized>(
        &self,
        norm: &HomogeneousNorm,
        rng: &mut R,
        samples: usize,
    ) -> f64 {
        norm::quasi_triangle_constant(self, norm, rng, samples)
    }

    /// Quotient by the central coordinates. Returns the quotient group and the
    /// indices of the surviving coordinates.
    pub fn quotient_by_center(&self) -> Result<(GroupSpec, Vec<usize>)> {
        let kept: Vec<usize> = (0..self.dim).filter(|i| !self.center.contains(i)).collect();
        let pos = |i: usize| kept.iter().position(|&k| k == i);
        let mut br = Vec::new();
        for s in &self.brackets {
            if let (Some(a), Some(b), Some(c)) = (pos(s.i), pos(s.j), pos(s.k)) {
                br.push((a, b, c, s.value));
            }
        }
        let mut weights: Vec<u32> = kept.iter().map(|&i| self.weights[i]).collect();
        if let Some(&m) = weights.iter().min() {
            if m > 1 {
                let g = weights.iter().fold(0u32, |g, &w| gcd(g, w));
                if g > 1 {
                    weights.iter_mut().for_each(|w| *w /= g);
                }
            }
        }
        let name = format!("{}/Z", self.name);
        let dim = kept.len();
        // the declared step is an upper bound; tighten it after construction
        let provisional = Self::new(name.clone(), dim, self.step.max(1).min(MAX_STEP), weights.clone(), &br, None)?;
        let step = provisional.nilpotency_step().max(if dim > 0 { 1 } else { 0 });
        let q = Self::new(name, dim, step, weights, &br, None)?;
        Ok((q, kept))
    }

    /// Repeated central quotients down to the trivial group, starting with `self`.
    pub fn quotient_chain(&self) -> Result<Vec<GroupSpec>> {
        let mut chain = vec![self.clone()];
        while chain.last().map_or(0, |g| g.dim) > 0 {
            let (q, _) = chain.last().expect("nonempty").quotient_by_center()?;
            chain.push(q);
        }
        Ok(chain)
    }

    /// The product `G x R` with the extra weight-one coordinate appended last.
    pub fn product_with_line(&self) -> GroupSpec {
        let mut weights = self.weights.clone();
        weights.push(1);
        let br: Vec<_> = self.brackets.iter().map(|s| (s.i, s.j, s.k, s.value)).collect();
        let mut center = self.center.clone();
        center.push(self.dim);
        Self::new(
            format!("{} x R", self.name),
            self.dim + 1,
            self.step.max(1),
            weights,
            &br,
            Some(center),
        )
        .expect("product with a central line is valid")
    }
}

thread_local! {
    static SCRATCH_NEG: RefCell<Vec<f64>> = const { RefCell::new(Vec::new()) };
    static SCRATCH_DIST: RefCell<Vec<f64>> = const { RefCell::new(Vec::new()) };
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Row-reduces `rows` and returns a basis of their span.
fn row_basis(mut rows: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for mut r in rows.drain(..) {
        for (b, &p) in basis.iter().zip(&pivots) {
            let f = r[p];
            if f != 0.0 {
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= f * y;
                }
            }
        }
        let (p, m) = r
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bi, bm), (i, &v)| if v.abs() > bm { (i, v.abs()) } else { (bi, bm) });
        if m > tol {
            let inv = 1.0 / r[p];
            r.iter_mut().for_each(|x| *x *= inv);
            for (b, &bp) in basis.iter_mut().zip(&pivots) {
                let f = b[p];
                if f != 0.0 {
                    for (x, y) in b.iter_mut().zip(&r) {
                        *x -= f * y;
                    }
                }
                let _ = bp;
            }
            basis.push(r);
            pivots.push(p);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_product_matches_closed_form() {
        let g = GroupSpec::heisenberg(1);
        let x = GroupElement::new(vec![1.0, 2.0, 3.0]);
        let y = GroupElement::new(vec![-0.5, 4.0, 1.0]);
        let p = g.multiply(&x, &y);
        let z = 3.0 + 1.0 + 0.5 * (1.0 * 4.0 - 2.0 * -0.5);
        assert_eq!(p.coords(), &[0.5, 6.0, z]);
    }

    #[test]
    fn step_seven_rejected() {
        let e = GroupSpec::new("x", 1, 7, vec![1], &[], None).unwrap_err();
        assert!(matches!(e, Error::StepTooLarge(7)));
    }

    #[test]
    fn conflicting_duplicate_rejected() {
        let br = [(0, 1, 2, 1.0), (1, 0, 2, 1.0)];
        assert!(GroupSpec::new("x", 3, 2, vec![1, 1, 2], &br, None).is_err());
        let ok = [(0, 1, 2, 1.0), (1, 0, 2, -1.0)];
        assert!(GroupSpec::new("x", 3, 2, vec![1, 1, 2], &ok, None).is_ok());
    }

    #[test]
    fn grading_violation_rejected() {
        let br = [(0, 1, 2, 1.0)];
        assert!(GroupSpec::new("x", 3, 2, vec![1, 1, 3], &br, None).is_err());
    }

    #[test]
    fn understated_step_rejected() {
        let br = [(0, 1, 2, 1.0), (0, 2, 3, 1.0)];
        assert!(GroupSpec::new("x", 4, 2, vec![1, 1, 2, 3], &br, None).is_err());
    }

    #[test]
    fn bad_center_rejected() {
        let br = [(0, 1, 2, 1.0)];
        let e = GroupSpec::new("x", 3, 2, vec![1, 1, 2], &br, Some(vec![0])).unwrap_err();
        assert!(matches!(e, Error::NotCentral(0)));
    }

    #[test]
    fn builtin_invariants() {
        for g in [
            GroupSpec::abelian(3),
            GroupSpec::heisenberg(1),
            GroupSpec::heisenberg(2),
            GroupSpec::free_step2_rank3(),
            GroupSpec::engel(),
        ] {
            assert!(g.jacobi_residual() < 1e-12, "{}", g.name());
            assert_eq!(g.nilpotency_step(), g.step(), "{}", g.name());
        }
        assert_eq!(GroupSpec::free_step2_rank3().homogeneous_dimension(), 9.0);
        assert_eq!(GroupSpec::heisenberg(1).homogeneous_dimension(), 4.0);
        assert_eq!(GroupSpec::heisenberg(1).center(), &[2]);
        assert_eq!(GroupSpec::engel().center(), &[3]);
    }

    #[test]
    fn quotients() {
        let (q, kept) = GroupSpec::heisenberg(1).quotient_by_center().unwrap();
        assert_eq!(kept, vec![0, 1]);
        assert!(q.is_abelian());
        assert_eq!(q.dim(), 2);

        let (q, _) = GroupSpec::engel().quotient_by_center().unwrap();
        assert_eq!(q.dim(), 3);
        assert_eq!(q.step(), 2);
        assert_eq!(q.center(), &[2]);

        let chain = GroupSpec::engel().quotient_chain().unwrap();
        let dims: Vec<_> = chain.iter().map(|g| g.dim()).collect();
        assert_eq!(dims, vec![4, 3, 2, 0]);

        let (q, _) = GroupSpec::abelian(2).quotient_by_center().unwrap();
        assert_eq!(q.dim(), 0);
    }

    #[test]
    fn dilation_by_one_is_identity() {
        let g = GroupSpec::engel();
        let x = GroupElement::new(vec![0.1, 0.2, 0.3, 0.4]);
        assert_eq!(g.dilate(&x, 1.0).unwrap(), x);
        assert!(g.dilate(&x, 0.0).is_err());
        assert!(g.dilate(&x, -2.0).is_err());
    }
}
