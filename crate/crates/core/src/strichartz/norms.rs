//! Mixed `L^p_t L^q_x` norms: trapezoid in time, the model's quadrature in space.

use super::admissibility::Exponent;
use super::propagate::SpatialSamples;
use crate::error::{LabError, Result};
use crate::quadrature::trapezoid;

/// `(∫ |u|^q dμ)^{1/q}`, or the grid maximum for `q = ∞`.
pub fn space_norm(samples: &SpatialSamples, q: f64) -> f64 {
    if q.is_infinite() {
        return samples.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    let s: f64 = samples.values.iter().enumerate().map(|(i, v)| samples.weights.get(i) * v.norm().powf(q)).sum();
    s.powf(1.0 / q)
}

/// `(∫_I f^p dt)^{1/p}` by the trapezoid rule, or the maximum for `p = ∞`.
pub fn time_norm(ts: &[f64], values: &[f64], p: f64) -> Result<f64> {
    if ts.is_empty() || ts.len() != values.len() {
        return Err(LabError::InvalidParameter("time grid and values must be nonempty and equally long".into()));
    }
    if p.is_infinite() {
        return Ok(values.iter().copied().fold(0.0, f64::max));
    }
    let powered: Vec<f64> = values.iter().map(|v| v.powf(p)).collect();
    Ok(trapezoid(ts, &powered).powf(1.0 / p))
}

/// `(∫_I (∫ |u|^q dμ)^{p/q} dt)^{1/p}` for samples at the times `ts`.
pub fn mixed_norm(slices: &[SpatialSamples], ts: &[f64], p: Exponent, q: Exponent) -> Result<f64> {
    if slices.is_empty() || slices.len() != ts.len() {
        return Err(LabError::InvalidParameter("one spatial slice per time is required".into()));
    }
    let (p, q) = (p.to_f64(), q.to_f64());
    if !(p >= 1.0 && q >= 1.0) {
        return Err(LabError::InvalidParameter(format!("exponents must be >= 1, got ({p}, {q})")));
    }
    let inner: Vec<f64> = slices.iter().map(|s| space_norm(s, q)).collect();
    time_norm(ts, &inner, p)
}
