//! Van der Corput bound `|∫_a^b e^{iλφ} ψ| <= C (c_k λ)^{-1/k} (|ψ(b)| + ∫|ψ'|)`
//! checked against quadrature.

use crate::error::{LabError, Result};
use crate::quadrature::{composite_nodes, pairwise_sum, pairwise_sum_complex, GaussLegendre};
use num_complex::Complex64;
use std::f64::consts::PI;

/// The constant `5·2^{k-1} - 2` for which the lemma is known to hold.
pub fn universal_constant(k: u32) -> f64 {
    5.0 * 2f64.powi(k as i32 - 1) - 2.0
}

/// A 1-d oscillatory integral on `[a, b]`.
pub struct Oscillator<'a> {
    pub phase: &'a dyn Fn(f64) -> f64,
    pub phase_derivative: &'a dyn Fn(f64) -> f64,
    pub amplitude: &'a dyn Fn(f64) -> f64,
    pub amplitude_derivative: &'a dyn Fn(f64) -> f64,
    pub interval: (f64, f64),
}

impl Oscillator<'_> {
    /// `∫ e^{iλφ} ψ` by composite Gauss-Legendre, 10 nodes per `2π` of phase.
    pub fn integrate(&self, lambda: f64) -> Complex64 {
        const ORDER: usize = 16;
        let (a, b) = self.interval;
        let max_d = (0..=256)
            .map(|j| (self.phase_derivative)(a + (b - a) * j as f64 / 256.0).abs())
            .fold(0.0, f64::max);
        let periods = lambda * max_d * (b - a) / (2.0 * PI);
        let panels = ((10.0 * periods / ORDER as f64).ceil() as usize).max(8);
        let (x, w) = composite_nodes(&GaussLegendre::new(ORDER), a, b, panels);
        let terms: Vec<Complex64> = x
            .iter()
            .zip(&w)
            .map(|(x, w)| Complex64::from_polar(w * (self.amplitude)(*x), lambda * (self.phase)(*x)))
            .collect();
        pairwise_sum_complex(&terms)
    }

    /// `|ψ(b)| + ∫_a^b |ψ'|`.
    pub fn amplitude_variation(&self) -> f64 {
        let (a, b) = self.interval;
        let (x, w) = composite_nodes(&GaussLegendre::new(16), a, b, 256);
        let terms: Vec<f64> = x.iter().zip(&w).map(|(x, w)| w * (self.amplitude_derivative)(*x).abs()).collect();
        (self.amplitude)(b).abs() + pairwise_sum(&terms)
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct VdcReport {
    pub lambdas: Vec<f64>,
    /// `|I(λ)| / ((c_k λ)^{-1/k} V)` per `λ`.
    pub constants: Vec<f64>,
    /// The constant at the smallest `λ`.
    pub fitted: f64,
    /// Every constant is within `margin` times the fitted one.
    pub holds_fitted: bool,
    /// Every constant is below [`universal_constant`].
    pub holds_universal: bool,
    pub holds: bool,
}

/// Verifies the premise `|φ^{(k)}| >= c_k` on a dense sample and then the bound
/// over the `λ` grid.
pub fn van_der_corput_check(
    osc: &Oscillator,
    k: u32,
    c_k: f64,
    kth_derivative: &dyn Fn(f64) -> f64,
    lambdas: &[f64],
    margin: f64,
) -> Result<VdcReport> {
    if k == 0 || c_k <= 0.0 {
        return Err(LabError::InvalidParameter("need k >= 1 and c_k > 0".into()));
    }
    if lambdas.is_empty() {
        return Err(LabError::Underdetermined("empty λ grid".into()));
    }
    let (a, b) = osc.interval;
    const DENSE: usize = 10_000;
    for j in 0..=DENSE {
        let x = a + (b - a) * j as f64 / DENSE as f64;
        let v = kth_derivative(x).abs();
        if v < c_k * (1.0 - 1e-12) {
            return Err(LabError::Inadmissible(format!("|φ^({k})({x})| = {v} < c_k = {c_k}")));
        }
    }
    let variation = osc.amplitude_variation();
    let constants: Vec<f64> = lambdas
        .iter()
        .map(|l| osc.integrate(*l).norm() / ((c_k * l).powf(-1.0 / k as f64) * variation))
        .collect();
    let fitted = constants[0];
    let holds_fitted = constants.iter().all(|c| *c <= margin * fitted);
    let holds_universal = constants.iter().all(|c| *c <= universal_constant(k));
    Ok(VdcReport {
        lambdas: lambdas.to_vec(),
        constants,
        fitted,
        holds_fitted,
        holds_universal,
        holds: holds_fitted && holds_universal,
    })
}
