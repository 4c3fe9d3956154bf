//! Hessian structure of the Klein-Gordon phase `η ↦ √(|η|² + h²m̃²)`.
//!
//! The Hessian `(I - η⊗η/P)/√P`, `P = |η|² + h²m̃²`, has `d - 1` eigenvalues
//! `1/√P` and one small eigenvalue `h²m̃²/P^{3/2}` in the direction of `η`.
//! Eliminating all but one coordinate from the phase `Φ̃ = √P - w·η` (at its
//! critical point in the other coordinates) leaves a 1-d phase `F(η_j)` whose
//! curvature is bounded below by a multiple of `h²m̃²`.

use crate::error::{LabError, Result};
use crate::geometry::MassParam;
use nalgebra::{DMatrix, DVector};

fn mu(mass: &MassParam, h: f64) -> f64 {
    (h * mass.m_tilde).powi(2)
}

/// The Hessian matrix of `√(|η|² + h²m̃²)`.
pub fn phase_hessian(mass: &MassParam, h: f64, eta: &[f64]) -> Result<DMatrix<f64>> {
    let e = DVector::from_column_slice(eta);
    if e.iter().all(|v| *v == 0.0) {
        return Err(LabError::Domain("Hessian spectrum needs η ≠ 0".into()));
    }
    let p = e.norm_squared() + mu(mass, h);
    let d = eta.len();
    Ok((DMatrix::identity(d, d) - &e * e.transpose() / p) / p.sqrt())
}

/// Eigenvalues of the phase Hessian, ascending, from a numerical symmetric
/// eigensolver.
pub fn hessian_spectrum(mass: &MassParam, h: f64, eta: &[f64]) -> Result<Vec<f64>> {
    let hess = phase_hessian(mass, h, eta)?;
    let mut ev: Vec<f64> = hess.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// The closed-form spectrum: `h²m̃²/P^{3/2}` once, `1/√P` with multiplicity `d - 1`.
pub fn hessian_spectrum_closed_form(mass: &MassParam, h: f64, eta: &[f64]) -> Result<Vec<f64>> {
    let n2: f64 = eta.iter().map(|v| v * v).sum();
    if n2 == 0.0 {
        return Err(LabError::Domain("Hessian spectrum needs η ≠ 0".into()));
    }
    let m = mu(mass, h);
    let p = n2 + m;
    let mut ev = vec![m / p.powf(1.5)];
    ev.extend(std::iter::repeat(1.0 / p.sqrt()).take(eta.len() - 1));
    Ok(ev)
}

/// `F''(η_j)` in closed form:
/// `(|ζ|² + h²m̃² - η_j²|ζ|²/(η_j² + h²m̃²)) / (|ζ|² + η_j² + h²m̃²)^{3/2}`.
pub fn reduced_phase_second_derivative(mass: &MassParam, h: f64, zeta: &[f64], eta_j: f64) -> f64 {
    let m = mu(mass, h);
    let z2: f64 = zeta.iter().map(|v| v * v).sum();
    let e2 = eta_j * eta_j;
    (z2 + m - e2 * z2 / (e2 + m)) / (z2 + e2 + m).powf(1.5)
}

/// The reduced 1-d phase at a target point `(ζ0, η0)`: `w = ∇√P(ζ0, η0)` is
/// frozen and, for each `η_j`, `ζ*(η_j)` solves `∇_ζ Φ̃ = 0` by Newton's method.
#[derive(Debug, Clone)]
pub struct ReducedPhase {
    mu: f64,
    w_zeta: DVector<f64>,
    w_j: f64,
    zeta0: DVector<f64>,
}

impl ReducedPhase {
    pub fn new(mass: &MassParam, h: f64, zeta0: &[f64], eta0: f64) -> Self {
        let m = mu(mass, h);
        let z = DVector::from_column_slice(zeta0);
        let sp = (z.norm_squared() + eta0 * eta0 + m).sqrt();
        ReducedPhase { mu: m, w_zeta: &z / sp, w_j: eta0 / sp, zeta0: z }
    }

    fn phi_tilde(&self, zeta: &DVector<f64>, s: f64) -> f64 {
        (zeta.norm_squared() + s * s + self.mu).sqrt() - self.w_zeta.dot(zeta) - self.w_j * s
    }

    /// `ζ*(s)`.
    pub fn critical_zeta(&self, s: f64) -> Result<DVector<f64>> {
        let k = self.zeta0.len();
        let mut z = self.zeta0.clone();
        for _ in 0..60 {
            let p = z.norm_squared() + s * s + self.mu;
            let sp = p.sqrt();
            let grad = &z / sp - &self.w_zeta;
            if grad.norm() < 1e-15 {
                return Ok(z);
            }
            let hess = (DMatrix::identity(k, k) - &z * z.transpose() / p) / sp;
            let step = hess
                .lu()
                .solve(&grad)
                .ok_or_else(|| LabError::Domain("singular ζ-Hessian".into()))?;
            z -= step;
        }
        let p = z.norm_squared() + s * s + self.mu;
        if (&z / p.sqrt() - &self.w_zeta).norm() < 1e-12 {
            Ok(z)
        } else {
            Err(LabError::Domain(format!("no critical ζ at η_j = {s}")))
        }
    }

    /// `F(s) = Φ̃(ζ*(s), s)`.
    pub fn value(&self, s: f64) -> Result<f64> {
        Ok(self.phi_tilde(&self.critical_zeta(s)?, s))
    }

    /// `F'(s) = s/√P(ζ*(s), s) - w_j`.
    pub fn first_derivative(&self, s: f64) -> Result<f64> {
        let z = self.critical_zeta(s)?;
        Ok(s / (z.norm_squared() + s * s + self.mu).sqrt() - self.w_j)
    }

    /// `F''(s)` from the closed form at `(ζ*(s), s)`.
    pub fn curvature(&self, s: f64) -> Result<f64> {
        let z = self.critical_zeta(s)?;
        let m = self.mu;
        let z2 = z.norm_squared();
        let e2 = s * s;
        Ok((z2 + m - e2 * z2 / (e2 + m)) / (z2 + e2 + m).powf(1.5))
    }

    /// Centered second difference of `F` with one Richardson step.
    pub fn second_derivative(&self, s: f64, step: f64) -> Result<f64> {
        let f0 = self.value(s)?;
        let d2 = |d: f64| -> Result<f64> { Ok((self.value(s + d)? - 2.0 * f0 + self.value(s - d)?) / (d * d)) };
        let (coarse, fine) = (d2(step)?, d2(step / 2.0)?);
        Ok((4.0 * fine - coarse) / 3.0)
    }
}

/// `F''` by numerical elimination of `ζ`.
pub fn reduced_phase_second_derivative_numeric(mass: &MassParam, h: f64, zeta: &[f64], eta_j: f64) -> Result<f64> {
    ReducedPhase::new(mass, h, zeta, eta_j).second_derivative(eta_j, 1e-2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mass() -> MassParam {
        MassParam::new(1.0).unwrap()
    }

    #[test]
    fn two_dimensional_example() {
        let ev = hessian_spectrum(&mass(), 0.1, &[1.0, 0.0]).unwrap();
        assert!((ev[0] - 0.01 / 1.01f64.powf(1.5)).abs() < 1e-12);
        assert!((ev[0] - 0.0098518).abs() < 1e-7 && (ev[1] - 0.9950372).abs() < 1e-7, "{ev:?}");
        assert!(hessian_spectrum(&mass(), 0.1, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn spectrum_matches_closed_form_and_trace() {
        for h in [1.0, 0.25, 1.0 / 64.0] {
            for eta in [[0.3, -0.7, 1.1], [2.0, 0.0, 0.0], [-0.4, 0.5, 0.2]] {
                let num = hessian_spectrum(&mass(), h, &eta).unwrap();
                let cf = hessian_spectrum_closed_form(&mass(), h, &eta).unwrap();
                for (a, b) in num.iter().zip(&cf) {
                    assert!((a - b).abs() < 1e-12, "{num:?} {cf:?}");
                }
                let tr = phase_hessian(&mass(), h, &eta).unwrap().trace();
                assert!((num.iter().sum::<f64>() - tr).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn smallest_eigenvalue_scales_like_h_squared() {
        let r: Vec<f64> = [1e-2, 5e-3]
            .iter()
            .map(|h| hessian_spectrum(&mass(), *h, &[1.0, 0.0]).unwrap()[0])
            .collect();
        assert!((r[0] / r[1] - 4.0).abs() < 1e-3);
    }

    #[test]
    fn reduced_curvature_closed_form() {
        let s = 0.5f64.sqrt();
        let f = reduced_phase_second_derivative(&mass(), 0.1, &[s], s);
        assert!((f - 0.019511).abs() < 1e-6, "{f}");
        let f0 = reduced_phase_second_derivative(&mass(), 0.1, &[0.0], 0.8);
        assert!((f0 - 0.01 / (0.64f64 + 0.01).powf(1.5)).abs() < 1e-15);
    }

    #[test]
    fn reduced_phase_satisfies_the_van_der_corput_bound() {
        use crate::cutoff::bump;
        use crate::oscillatory::van_der_corput::{van_der_corput_check, Oscillator};
        let h = 0.1;
        let f = ReducedPhase::new(&mass(), h, &[0.7], 0.7);
        let (lo, hi) = (0.5, 1.5);
        let c2 = (0..=200)
            .map(|j| f.curvature(lo + (hi - lo) * j as f64 / 200.0).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(c2 > 0.1 * h * h);
        let amp = |s: f64| bump((2.0 * s - lo - hi) / (hi - lo));
        let damp = |s: f64| {
            let d = 1e-6;
            (amp(s + d) - amp(s - d)) / (2.0 * d)
        };
        let phase = |s: f64| f.value(s).unwrap();
        let dphase = |s: f64| f.first_derivative(s).unwrap();
        let osc = Oscillator { phase: &phase, phase_derivative: &dphase, amplitude: &amp, amplitude_derivative: &damp, interval: (lo, hi) };
        let curv = |s: f64| f.curvature(s).unwrap();
        let r = van_der_corput_check(&osc, 2, c2, &curv, &[1e3, 1e4, 1e5], 2.0).unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn reduced_curvature_numeric_agrees() {
        for h in [0.5, 0.1, 0.05] {
            for (zeta, eta) in [(vec![0.7071], 0.7071), (vec![1.2, -0.4], 0.6), (vec![0.3], -1.5)] {
                let cf = reduced_phase_second_derivative(&mass(), h, &zeta, eta);
                let num = reduced_phase_second_derivative_numeric(&mass(), h, &zeta, eta).unwrap();
                assert!((num - cf).abs() < 1e-6 * cf, "h={h}: {num} vs {cf}");
            }
        }
    }
}
