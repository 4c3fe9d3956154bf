//! Leading-order stationary phase and a quadrature harness that measures the
//! `λ^{-n/2-1}` remainder.

use crate::error::{LabError, Result};
use crate::fit::fit_line;
use crate::linalg::{determinant, inverse, symmetric_eigenvalues, Matrix, Vector};
use crate::quadrature::{composite_nodes, pairwise_sum_complex, GaussLegendre};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

type Field<const N: usize, T> = Arc<dyn Fn(&Vector<N>) -> T + Send + Sync>;

/// A real phase with its gradient and Hessian.
#[derive(Clone)]
pub struct SmoothPhase<const N: usize> {
    pub value: Field<N, f64>,
    pub gradient: Field<N, Vector<N>>,
    pub hessian: Field<N, Matrix<N>>,
}

impl<const N: usize> SmoothPhase<N> {
    pub fn new(
        value: impl Fn(&Vector<N>) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&Vector<N>) -> Vector<N> + Send + Sync + 'static,
        hessian: impl Fn(&Vector<N>) -> Matrix<N> + Send + Sync + 'static,
    ) -> Self {
        SmoothPhase { value: Arc::new(value), gradient: Arc::new(gradient), hessian: Arc::new(hessian) }
    }

    /// `Φ(x) = ½ Σ c_i x_i²`.
    pub fn quadratic(c: [f64; N]) -> Self {
        SmoothPhase::new(
            move |x| 0.5 * (0..N).map(|i| c[i] * x[i] * x[i]).sum::<f64>(),
            move |x| Vector::<N>::from_fn(|i, _| c[i] * x[i]),
            move |_| Matrix::<N>::from_fn(|i, j| if i == j { c[i] } else { 0.0 }),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StationaryPhase<const N: usize> {
    Stationary {
        point: Vector<N>,
        /// Number of positive minus number of negative Hessian eigenvalues.
        signature: i32,
        determinant: f64,
        /// `(2π/λ)^{n/2} e^{iλΦ(x*)} |det ∇²Φ(x*)|^{-1/2} e^{iπσ/4} a(x*)`.
        leading: Complex64,
    },
    NonStationary { reason: String },
}

/// Locates the critical point by Newton's method from `guess` and returns the
/// leading stationary-phase term of `∫ e^{iλΦ} a`.
pub fn stationary_phase_reference<const N: usize>(
    phase: &SmoothPhase<N>,
    amplitude: &dyn Fn(&Vector<N>) -> f64,
    lambda: f64,
    guess: &Vector<N>,
) -> StationaryPhase<N> {
    let mut x = *guess;
    let mut converged = false;
    for _ in 0..100 {
        let g = (phase.gradient)(&x);
        if g.norm() < 1e-14 {
            converged = true;
            break;
        }
        let Some(hinv) = inverse(&(phase.hessian)(&x)) else {
            return StationaryPhase::NonStationary { reason: "singular Hessian during Newton search".into() };
        };
        x -= hinv * g;
        if !x.iter().all(|v| v.is_finite()) {
            break;
        }
    }
    if !converged {
        return StationaryPhase::NonStationary { reason: "no critical point found".into() };
    }
    let hess = (phase.hessian)(&x);
    let det = determinant(&hess);
    let scale = hess.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    if det.abs() <= 1e-6 * scale.powi(N as i32) {
        return StationaryPhase::NonStationary { reason: format!("degenerate critical point at {:?}", x.as_slice()) };
    }
    let a = amplitude(&x);
    if a == 0.0 {
        return StationaryPhase::NonStationary { reason: "amplitude vanishes at the critical point".into() };
    }
    let ev = symmetric_eigenvalues(&hess);
    let signature = ev.iter().map(|v| if *v > 0.0 { 1 } else { -1 }).sum::<i32>();
    let leading = Complex64::from_polar(
        (2.0 * PI / lambda).powf(N as f64 / 2.0) * det.abs().powf(-0.5) * a,
        lambda * (phase.value)(&x) + PI * signature as f64 / 4.0,
    );
    StationaryPhase::Stationary { point: x, signature, determinant: det, leading }
}

/// `∫_box e^{iλΦ} a` by tensor composite Gauss-Legendre with
/// `10 * resolution` nodes per `2π` of phase variation per axis.
pub fn oscillatory_quadrature<const N: usize>(
    phase: &SmoothPhase<N>,
    amplitude: &dyn Fn(&Vector<N>) -> f64,
    lambda: f64,
    bounds: &[(f64, f64); N],
    resolution: f64,
) -> Result<Complex64> {
    const ORDER: usize = 16;
    const SAMPLES: usize = 33;
    // sample |∂_i Φ| on a coarse grid
    let mut max_grad = [0.0f64; N];
    for k in 0..SAMPLES.pow(N as u32) {
        let mut c = k;
        let x = Vector::<N>::from_fn(|i, _| {
            let j = c % SAMPLES;
            c /= SAMPLES;
            let (lo, hi) = bounds[i];
            lo + (hi - lo) * j as f64 / (SAMPLES - 1) as f64
        });
        let g = (phase.gradient)(&x);
        for i in 0..N {
            max_grad[i] = max_grad[i].max(g[i].abs());
        }
    }
    let rule = GaussLegendre::new(ORDER);
    let mut axes = Vec::with_capacity(N);
    let mut total: u64 = 1;
    for i in 0..N {
        let (lo, hi) = bounds[i];
        let periods = lambda * max_grad[i] * (hi - lo) / (2.0 * PI);
        let panels = ((10.0 * resolution * periods / ORDER as f64).ceil() as usize).max(8);
        total = total.saturating_mul((panels * ORDER) as u64);
        axes.push(composite_nodes(&rule, lo, hi, panels));
    }
    if total > 100_000_000 {
        return Err(LabError::ResolutionBudget { required: total, budget: 100_000_000 });
    }
    let sizes: Vec<usize> = axes.iter().map(|a| a.0.len()).collect();
    let mut terms = Vec::with_capacity(total as usize);
    for k in 0..total as usize {
        let mut c = k;
        let mut w = 1.0;
        let x = Vector::<N>::from_fn(|i, _| {
            let j = c % sizes[i];
            c /= sizes[i];
            w *= axes[i].1[j];
            axes[i].0[j]
        });
        let a = amplitude(&x);
        if a != 0.0 {
            terms.push(Complex64::from_polar(w * a, lambda * (phase.value)(&x)));
        }
    }
    Ok(pairwise_sum_complex(&terms))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StationaryPhaseReport {
    pub lambdas: Vec<f64>,
    pub errors: Vec<f64>,
    /// `error · λ^{n/2+1}`.
    pub scaled: Vec<f64>,
    /// Log-log slope of the error against `λ`.
    pub slope: f64,
    pub holds: bool,
}

/// Compares quadrature against the leading term over a `λ` sweep. The bound
/// `|quadrature - leading| <= C λ^{-n/2-1}` holds when the constant fitted at
/// the smallest `λ` (times `margin`) covers every larger `λ`.
pub fn stationary_phase_check<const N: usize>(
    phase: &SmoothPhase<N>,
    amplitude: &dyn Fn(&Vector<N>) -> f64,
    lambdas: &[f64],
    bounds: &[(f64, f64); N],
    guess: &Vector<N>,
    resolution: f64,
    margin: f64,
) -> Result<StationaryPhaseReport> {
    if lambdas.len() < 2 {
        return Err(LabError::Underdetermined("need at least two λ values".into()));
    }
    let mut errors = Vec::new();
    for &lambda in lambdas {
        let leading = match stationary_phase_reference(phase, amplitude, lambda, guess) {
            StationaryPhase::Stationary { leading, .. } => leading,
            StationaryPhase::NonStationary { reason } => return Err(LabError::Domain(reason)),
        };
        let q = oscillatory_quadrature(phase, amplitude, lambda, bounds, resolution)?;
        errors.push((q - leading).norm());
    }
    let order = N as f64 / 2.0 + 1.0;
    let scaled: Vec<f64> = errors.iter().zip(lambdas).map(|(e, l)| e * l.powf(order)).collect();
    let logs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let loge: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let slope = fit_line(&logs, &loge)?.slope;
    let holds = scaled.iter().all(|c| *c <= margin * scaled[0]);
    Ok(StationaryPhaseReport { lambdas: lambdas.to_vec(), errors, scaled, slope, holds })
}
