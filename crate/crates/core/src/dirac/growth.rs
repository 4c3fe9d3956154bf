//! `L^q` growth of the radial eigenfunction profiles and the Jacobi moment
//! asymptotics behind it.

use super::eigen::{eigenfunction, Sign, SpinorEigenfunction};
use super::jacobi::jacobi_value;
use crate::error::{LabError, Result};
use crate::fit::{fit_line, LineFit};
use crate::quadrature::{composite_nodes, GaussLegendre};
use crate::strichartz::Exponent;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

const PANEL_NODES: usize = 16;

/// `(∫₀^π [(C²/2)(φ² + ψ²)]^{q/2} sin^{d-1}θ dθ)^{1/q}`, grid maximum of
/// `√((C²/2)(φ² + ψ²))` for `q = ∞`. The angular factor is left out.
///
/// Gauss-Legendre in θ with `4(n + 20)·⌈q/2⌉` nodes; the integrand is a
/// trigonometric polynomial for even `d` and smooth for odd `d`.
pub fn lq_radial_norm(f: &SpinorEigenfunction, q: Exponent) -> Result<f64> {
    let base = 4 * (f.n + 20);
    match q {
        Exponent::Infinite => {
            let m = 8 * base;
            let best = (0..=m)
                .map(|i| f.density(PI * i as f64 / m as f64))
                .fold(0.0f64, f64::max);
            Ok(best.sqrt())
        }
        Exponent::Finite(_) => {
            let qf = q.to_f64();
            if qf < 1.0 {
                return Err(LabError::InvalidParameter(format!("q must be at least 1, got {qf}")));
            }
            let nodes = base * (qf / 2.0).ceil().max(1.0) as usize;
            let rule = GaussLegendre::new(PANEL_NODES);
            let (xs, ws) = composite_nodes(&rule, 0.0, PI, nodes.div_ceil(PANEL_NODES));
            let sum: f64 = xs
                .iter()
                .zip(&ws)
                .map(|(t, w)| w * f.density(*t).powf(qf / 2.0) * t.sin().powi(f.d as i32 - 1))
                .sum();
            Ok(sum.powf(1.0 / qf))
        }
    }
}

/// `s(q) = (d-1)/2 - d/q`.
pub fn sogge_exponent(d: usize, q: Exponent) -> f64 {
    (d as f64 - 1.0) / 2.0 - d as f64 * q.to_f64().recip()
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthSample {
    pub n: usize,
    pub lambda: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SoggeFit {
    pub d: usize,
    pub q: f64,
    pub slope: f64,
    pub predicted: f64,
    /// `q` below `2(d+1)/(d-1)`, where the exponent is not claimed.
    pub below_threshold: bool,
    pub fit: LineFit,
    pub samples: Vec<GrowthSample>,
}

/// Least-squares slope of `ln ‖Ψ_n‖_q` against `ln(n + d/2)` for `ℓ = 0`.
pub fn sogge_fit(d: usize, q: Exponent, ns: &[usize]) -> Result<SoggeFit> {
    if ns.len() < 3 {
        return Err(LabError::Underdetermined(format!("{} degrees given, need at least 3", ns.len())));
    }
    let samples: Vec<GrowthSample> = ns
        .par_iter()
        .map(|&n| {
            let f = eigenfunction(d, n, 0, Sign::Plus)?;
            Ok(GrowthSample { n, lambda: f.eigenvalue, norm: lq_radial_norm(&f, q)? })
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = samples.iter().map(|s| s.lambda.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.norm.ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    let threshold = 2.0 * (d as f64 + 1.0) / (d as f64 - 1.0);
    Ok(SoggeFit {
        d,
        q: q.to_f64(),
        slope: fit.slope,
        predicted: sogge_exponent(d, q),
        below_threshold: q.to_f64() < threshold,
        fit,
        samples,
    })
}

/// `∫₀¹ (1-x)^r |P_n^{(α,β)}(x)|^p dx`, integrated in `θ = arccos x` with
/// one composite panel per unit of degree.
pub fn jacobi_moment(n: usize, alpha: f64, beta: f64, p: f64, r: f64) -> f64 {
    let rule = GaussLegendre::new(PANEL_NODES);
    let (ts, ws) = composite_nodes(&rule, 0.0, PI / 2.0, 2 * n + 8);
    ts.iter()
        .zip(&ws)
        .map(|(t, w)| {
            let x = t.cos();
            w * (2.0 * (t / 2.0).sin().powi(2)).powf(r) * jacobi_value(n, alpha, beta, x).abs().powf(p) * t.sin()
        })
        .sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentFit {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub r: f64,
    pub slope: f64,
    pub predicted: f64,
    pub fit: LineFit,
    pub moments: Vec<(usize, f64)>,
}

/// Degree above which the plain recurrence is not trusted for moments.
pub const MAX_MOMENT_DEGREE: usize = 600;

/// Slope of `ln` moment against `ln n`, compared to `αp - 2r - 2`. Requires
/// `2r < αp - 2 + p/2`.
pub fn jacobi_moment_fit(alpha: f64, beta: f64, p: f64, r: f64, ns: &[usize]) -> Result<MomentFit> {
    let bound = alpha * p - 2.0 + p / 2.0;
    if 2.0 * r >= bound {
        return Err(LabError::Precondition(format!("2r < αp - 2 + p/2 fails: {} >= {bound}", 2.0 * r)));
    }
    if ns.len() < 3 {
        return Err(LabError::Underdetermined(format!("{} degrees given, need at least 3", ns.len())));
    }
    if let Some(n) = ns.iter().find(|n| **n > MAX_MOMENT_DEGREE || **n == 0) {
        return Err(LabError::InvalidParameter(format!("degree {n} outside 1..={MAX_MOMENT_DEGREE}")));
    }
    let moments: Vec<(usize, f64)> = ns.par_iter().map(|&n| (n, jacobi_moment(n, alpha, beta, p, r))).collect();
    let xs: Vec<f64> = moments.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = moments.iter().map(|(_, m)| m.ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    Ok(MomentFit { alpha, beta, p, r, slope: fit.slope, predicted: alpha * p - 2.0 * r - 2.0, fit, moments })
}

/// `count` integers spread geometrically over `[lo, hi]`, deduplicated.
pub fn geometric_degrees(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    let ratio = (hi as f64 / lo as f64).ln();
    let mut v: Vec<usize> = (0..count)
        .map(|i| (lo as f64 * (ratio * i as f64 / (count - 1) as f64).exp()).round() as usize)
        .collect();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_norm_is_one() {
        for &(d, n, l) in &[(2, 0, 0), (3, 7, 2), (4, 20, 5), (5, 30, 0)] {
            let f = eigenfunction(d, n, l, Sign::Plus).unwrap();
            let v = lq_radial_norm(&f, Exponent::int(2)).unwrap();
            assert!((v - 1.0).abs() < 1e-10, "{d} {n} {l}: {v}");
        }
    }

    #[test]
    fn sup_norm_of_ground_state() {
        let f = eigenfunction(2, 0, 0, Sign::Plus).unwrap();
        let v = lq_radial_norm(&f, Exponent::Infinite).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn quadratic_growth_is_flat() {
        let fit = sogge_fit(2, Exponent::int(2), &[16, 32, 64]).unwrap();
        assert!(fit.slope.abs() < 1e-8);
        assert!(fit.below_threshold);
    }

    #[test]
    fn sup_growth_on_two_sphere() {
        let fit = sogge_fit(2, Exponent::Infinite, &geometric_degrees(16, 256, 9)).unwrap();
        assert!((fit.slope - 0.5).abs() < 0.03, "{}", fit.slope);
        assert_eq!(fit.predicted, 0.5);
    }

    #[test]
    fn moment_constraint_is_enforced() {
        assert!(matches!(jacobi_moment_fit(0.0, 0.0, 2.0, 0.0, &[16, 32, 64]), Err(LabError::Precondition(_))));
        assert!(jacobi_moment_fit(1.0, 2.0, 4.0, 0.0, &[16, 700, 64]).is_err());
    }

    #[test]
    fn moment_exponent_small_range() {
        let fit = jacobi_moment_fit(1.0, 2.0, 4.0, 0.0, &geometric_degrees(32, 256, 6)).unwrap();
        assert!((fit.slope - 2.0).abs() < 0.1, "{}", fit.slope);
    }

    #[test]
    fn geometric_degrees_cover_range() {
        let v = geometric_degrees(16, 256, 5);
        assert_eq!(v, vec![16, 32, 64, 128, 256]);
    }
}
