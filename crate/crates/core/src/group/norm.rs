//! Homogeneous quasi-norms, ball volumes and the quasi-triangle constant.

use rand::Rng;

use super::GroupSpec;
use crate::error::{Error, Result};

/// A quasi-norm homogeneous with respect to the group dilations.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum HomogeneousNorm {
    /// `max_i |x_i|^{1/w_i}`.
    #[default]
    WeightedMax,
    /// `(sum_i |x_i|^{p/w_i})^{1/p}`.
    WeightedSum { p: f64 },
}

impl HomogeneousNorm {
    pub fn weighted_sum(p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::UnsupportedExponent(p));
        }
        Ok(Self::WeightedSum { p })
    }

    #[inline]
    pub fn eval(&self, spec: &GroupSpec, x: &[f64]) -> f64 {
        let w = spec.weights();
        match *self {
            Self::WeightedMax => {
                let mut m: f64 = 0.0;
                for (v, &wi) in x.iter().zip(w) {
                    m = m.max(root(v.abs(), wi));
                }
                m
            }
            Self::WeightedSum { p } => {
                let s: f64 = x
                    .iter()
                    .zip(spec.inv_weights())
                    .map(|(v, iw)| v.abs().powf(p * iw))
                    .sum();
                s.powf(1.0 / p)
            }
        }
    }
}

#[inline]
fn root(a: f64, w: u32) -> f64 {
    match w {
        1 => a,
        2 => a.sqrt(),
        3 => a.cbrt(),
        _ => a.powf(1.0 / w as f64),
    }
}

/// Volume of a ball together with its statistical error (zero when exact).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_error: f64,
    pub exact: bool,
}

pub(super) fn ball_volume<R: Rng + ?Sized>(
    spec: &GroupSpec,
    norm: &HomogeneousNorm,
    radius: f64,
    rng: &mut R,
    samples: usize,
) -> Result<VolumeEstimate> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let n = spec.dim();
    let scale = radius.powf(spec.homogeneous_dimension());
    let cube = 2f64.powi(n as i32);
    match norm {
        HomogeneousNorm::WeightedMax => Ok(VolumeEstimate { value: cube * scale, std_error: 0.0, exact: true }),
        HomogeneousNorm::WeightedSum { .. } => {
            if samples == 0 {
                return Err(Error::InvalidArgument("Monte Carlo volume needs samples > 0".into()));
            }
            let mut x = vec![0.0; n];
            let mut hits = 0usize;
            for _ in 0..samples {
                for v in x.iter_mut() {
                    *v = rng.random_range(-1.0..1.0);
                }
                if norm.eval(spec, &x) < 1.0 {
                    hits += 1;
                }
            }
            let frac = hits as f64 / samples as f64;
            let se = (frac * (1.0 - frac) / samples as f64).sqrt();
            Ok(VolumeEstimate { value: cube * frac * scale, std_error: cube * se * scale, exact: false })
        }
    }
}

pub(super) fn quasi_triangle_constant<R: Rng + ?Sized>(
    spec: &GroupSpec,
    norm: &HomogeneousNorm,
    rng: &mut R,
    samples: usize,
) -> f64 {
    let n = spec.dim();
    let mut worst: f64 = 1.0;
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut xy = vec![0.0; n];
    for _ in 0..samples {
        // random directions at independent scales
        let sx: f64 = 10f64.powf(rng.random_range(-1.0..1.0));
        let sy: f64 = 10f64.powf(rng.random_range(-1.0..1.0));
        for (i, &w) in spec.weights().iter().enumerate() {
            x[i] = rng.random_range(-1.0..1.0) * sx.powi(w as i32);
            y[i] = rng.random_range(-1.0..1.0) * sy.powi(w as i32);
        }
        spec.multiply_into(&x, &y, &mut xy);
        let denom = norm.eval(spec, &x) + norm.eval(spec, &y);
        if denom > 0.0 {
            worst = worst.max(norm.eval(spec, &xy) / denom);
        }
    }
    worst
}
