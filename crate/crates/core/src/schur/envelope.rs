//! Radial, nonincreasing step functions used as matrix envelopes.

use crate::error::{Error, Result};

/// A nonincreasing step function of the radius: `values[i]` on `[edges[i], edges[i+1])`,
/// zero from the last edge on.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeFunction {
    edges: Vec<f64>,
    values: Vec<f64>,
}

/// Least-squares fit `env(r) ≈ constant (1 + r)^{-exponent}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    /// Infinite when only the first bin is nonzero.
    pub exponent: f64,
    pub constant: f64,
    pub bins_used: usize,
}

impl EnvelopeFunction {
    pub fn new(edges: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if edges.len() != values.len() + 1 || edges.first() != Some(&0.0) {
            return Err(Error::InvalidArgument("envelope needs edges starting at 0 and one more edge than values".into()));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("envelope edges must increase".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument("envelope values must be finite and nonnegative".into()));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument("envelope values must be nonincreasing".into()));
        }
        Ok(Self { edges, values })
    }

    /// Identically zero envelope.
    pub fn zero() -> Self {
        Self { edges: vec![0.0], values: Vec::new() }
    }

    /// Majorant of a nonincreasing profile `f` on bins of width `bin_width` up to `support`.
    pub fn from_fn(f: impl Fn(f64) -> f64, bin_width: f64, support: f64) -> Self {
        let n = (support / bin_width).ceil().max(1.0) as usize;
        let edges: Vec<f64> = (0..=n).map(|i| i as f64 * bin_width).collect();
        let values: Vec<f64> = edges[..n].iter().map(|&r| f(r).abs()).collect();
        Self::suffix_max(edges, values)
    }

    /// Smallest nonincreasing step function dominating the samples `(r, v)`.
    pub fn from_samples(samples: impl IntoIterator<Item = (f64, f64)>, bin_width: f64) -> Self {
        let mut values: Vec<f64> = Vec::new();
        for (r, v) in samples {
            let b = (r / bin_width).floor().max(0.0) as usize;
            if values.len() <= b {
                values.resize(b + 1, 0.0);
            }
            values[b] = values[b].max(v.abs());
        }
        while values.last() == Some(&0.0) {
            values.pop();
        }
        let edges = (0..=values.len()).map(|i| i as f64 * bin_width).collect();
        Self::suffix_max(edges, values)
    }

    fn suffix_max(edges: Vec<f64>, mut values: Vec<f64>) -> Self {
        for i in (0..values.len().saturating_sub(1)).rev() {
            values[i] = values[i].max(values[i + 1]);
        }
        Self { edges, values }
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Radius beyond which the envelope vanishes.
    pub fn support(&self) -> f64 {
        *self.edges.last().expect("edges are never empty")
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        if r < 0.0 || r >= self.support() {
            return 0.0;
        }
        let i = self.edges.partition_point(|&e| e <= r) - 1;
        self.values[i]
    }

    /// Pointwise sum of two envelopes on the union of their edges.
    pub fn add(&self, other: &EnvelopeFunction) -> EnvelopeFunction {
        let mut edges: Vec<f64> = self.edges.iter().chain(&other.edges).copied().collect();
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let values = edges[..edges.len() - 1].iter().map(|&r| self.eval(r) + other.eval(r)).collect();
        Self { edges, values }
    }

    pub fn fit_decay(&self) -> DecayFit {
        let v0 = self.values.first().copied().unwrap_or(0.0);
        let pts: Vec<(f64, f64)> = self
            .values
            .iter()
            .zip(&self.edges)
            .filter(|(v, _)| **v > 1e-13 * v0 && **v > 0.0)
            .map(|(v, r)| ((1.0 + r).ln(), v.ln()))
            .collect();
        if pts.len() < 2 {
            return DecayFit { exponent: f64::INFINITY, constant: v0, bins_used: pts.len() };
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        DecayFit { exponent: -slope, constant: (my - slope * mx).exp(), bins_used: pts.len() }
    }
}

/// Smooth step: `1` on `[-1, 1]`, `0` outside `(-2, 2)`, infinitely differentiable.
pub fn eta(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        return 1.0;
    }
    if a >= 2.0 {
        return 0.0;
    }
    let s = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
    let p = s(2.0 - a);
    p / (p + s(a - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_majorant() {
        let e = EnvelopeFunction::from_samples([(0.0, 1.0), (0.6, 0.2), (1.7, 0.5)], 0.5);
        assert_eq!(e.values(), &[1.0, 0.5, 0.5, 0.5]);
        assert_eq!(e.eval(1.9), 0.5);
        assert_eq!(e.eval(2.0), 0.0);
    }

    #[test]
    fn delta_profile_has_infinite_exponent() {
        let e = EnvelopeFunction::from_samples([(0.0, 2.0)], 0.5);
        assert!(e.fit_decay().exponent.is_infinite());
    }

    #[test]
    fn polynomial_decay_recovered() {
        let e = EnvelopeFunction::from_fn(|r| (1.0 + r).powi(-5), 0.25, 30.0);
        assert!((e.fit_decay().exponent - 5.0).abs() < 1e-9);
    }

    #[test]
    fn eta_shape() {
        assert_eq!(eta(0.0), 1.0);
        assert_eq!(eta(-1.0), 1.0);
        assert_eq!(eta(2.0), 0.0);
        assert!((eta(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 0..=100 {
            let v = eta(1.0 + k as f64 / 100.0);
            assert!(v <= prev);
            prev = v;
        }
    }
}
