//! Loss-exponent regression: `log(‖e^{itP^{1/2}} u_k‖_{L^p L^q} / ‖u_k‖_{L²})`
//! against `k log 2` over dyadic shells `u_k`.

use super::admissibility::{exponents, AdmissiblePair, ExponentReport};
use super::norms::{space_norm, time_norm};
use super::partition::DyadicPartition;
use super::propagate::{spectral_propagate, SpectralData, TorusData};
use crate::error::{LabError, Result};
use crate::fit::{fit_line, LineFit};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// `t_j = t_max (j/J)^3`, `j = 0..=J`: dense near `t = 0`, where coherent
/// states at frequency `2^k` vary on the scale `2^{-k}`.
pub fn graded_times(t_max: f64, count: usize) -> Vec<f64> {
    let j = count.max(2) - 1;
    (0..=j).map(|i| t_max * (i as f64 / j as f64).powi(3)).collect()
}

/// `‖e^{itP_m^{1/2}} u‖_{L^p(I, L^q)} / ‖u‖_{L²}` on the time grid `ts`.
pub fn strichartz_quotient(data: &SpectralData, mass: f64, ts: &[f64], pair: &AdmissiblePair) -> Result<f64> {
    let l2 = data.l2_norm();
    if l2 == 0.0 {
        return Err(LabError::InvalidParameter("zero data".into()));
    }
    let q = pair.q.to_f64();
    let inner: Vec<f64> = ts
        .iter()
        .map(|t| spectral_propagate(data, mass, *t).map(|s| space_norm(&s, q)))
        .collect::<Result<_>>()?;
    Ok(time_norm(ts, &inner, pair.p.to_f64())? / l2)
}

/// All `n ∈ ℤ^d` with `φ(2^{-2k}|n|²) ≠ 0`, with that multiplier as coefficient:
/// the Littlewood-Paley projection of a delta at the origin.
pub fn shell_coherent_state(partition: &DyadicPartition, d: usize, k: u32) -> TorusData {
    let r = (2f64.powi(2 * k as i32 + 1)).sqrt().ceil() as i64;
    let mut out = TorusData::new(d);
    let mut idx = vec![-r; d];
    loop {
        let lam: f64 = idx.iter().map(|v| (v * v) as f64).sum();
        let w = partition.shell(k, lam);
        if w != 0.0 {
            out.modes.insert(idx.clone(), Complex64::new(w, 0.0));
        }
        let mut a = d;
        loop {
            if a == 0 {
                return out;
            }
            a -= 1;
            if idx[a] < r {
                idx[a] += 1;
                break;
            }
            idx[a] = -r;
        }
    }
}

/// Trial `trial` on shell `k`: trial 0 is the coherent state; the others put
/// independent complex Gaussian coefficients under the shell multiplier.
/// Reproducible from `(seed, k, trial)`.
pub fn torus_trial(partition: &DyadicPartition, d: usize, k: u32, trial: u64, seed: u64) -> TorusData {
    let shell = shell_coherent_state(partition, d, k);
    if trial == 0 {
        return shell;
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((k as u64) << 32) | trial);
    let modes = shell
        .modes
        .into_iter()
        .map(|(n, w)| {
            let (a, b): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
            (n, w * Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2)
        })
        .collect();
    TorusData { d, modes }
}

/// Slope of `log Q_k` against `k log 2`.
pub fn loss_exponent_fit(ks: &[u32], quotients: &[f64]) -> Result<LineFit> {
    if ks.len() < 4 {
        return Err(LabError::Underdetermined(format!("{} shells, need at least 4", ks.len())));
    }
    let xs: Vec<f64> = ks.iter().map(|k| *k as f64 * std::f64::consts::LN_2).collect();
    let ys: Vec<f64> = quotients.iter().map(|q| q.ln()).collect();
    fit_line(&xs, &ys)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ShellResult {
    pub k: u32,
    pub quotients: Vec<f64>,
    /// Largest quotient over the trials: a lower bound for the operator norm.
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LossReport {
    pub shells: Vec<ShellResult>,
    pub fit: LineFit,
    pub predicted_loss: f64,
    /// Slope, over the upper half of the shells, of the residuals of
    /// `log₂ max_k` about the fitted line. Positive values mean growth that
    /// accelerates with frequency.
    pub excess_trend: f64,
}

/// Loss sweep on the torus `(ℝ/2πℤ)^d` over shells `ks`, with `trials` trials per shell.
pub fn torus_loss_sweep(
    d: usize,
    mass: f64,
    pair: &AdmissiblePair,
    partition: &DyadicPartition,
    ks: &[u32],
    trials: u64,
    seed: u64,
    ts: &[f64],
) -> Result<LossReport> {
    if pair.d as usize != d {
        return Err(LabError::InvalidParameter(format!("pair is for d = {}, model has d = {d}", pair.d)));
    }
    let report: ExponentReport = exponents(pair)?;
    let mut shells = Vec::with_capacity(ks.len());
    for &k in ks {
        let quotients: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|j| strichartz_quotient(&SpectralData::Torus(torus_trial(partition, d, k, j, seed)), mass, ts, pair))
            .collect::<Result<_>>()?;
        let max = quotients.iter().copied().fold(0.0, f64::max);
        shells.push(ShellResult { k, quotients, max });
    }
    let maxima: Vec<f64> = shells.iter().map(|s| s.max).collect();
    let fit = loss_exponent_fit(ks, &maxima)?;
    let excess_trend = excess_trend(ks, &maxima, &fit)?;
    Ok(LossReport { shells, fit, predicted_loss: ExponentReport::to_f64(report.predicted_loss), excess_trend })
}

fn excess_trend(ks: &[u32], maxima: &[f64], fit: &LineFit) -> Result<f64> {
    let start = ks.len() / 2;
    let xs: Vec<f64> = ks[start..].iter().map(|k| *k as f64).collect();
    let res: Vec<f64> = ks[start..]
        .iter()
        .zip(&maxima[start..])
        .map(|(k, m)| (m.ln() - fit.intercept - fit.slope * *k as f64 * std::f64::consts::LN_2) / std::f64::consts::LN_2)
        .collect();
    if xs.len() < 2 {
        return Ok(0.0);
    }
    Ok(fit_line(&xs, &res)?.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strichartz::admissibility::{Class, Exponent};
    use crate::strichartz::partition::build_partition;
    use crate::strichartz::propagate::ZonalData;

    #[test]
    fn coherent_state_occupies_one_shell() {
        let p = build_partition(8).unwrap();
        let u = shell_coherent_state(&p, 2, 4);
        assert!(u.modes.keys().all(|n| {
            let r2 = (n[0] * n[0] + n[1] * n[1]) as f64;
            r2 > 64.0 && r2 < 512.0
        }));
        assert!(u.modes.contains_key(&vec![16, 0]));
    }

    #[test]
    fn trials_are_reproducible() {
        let p = build_partition(8).unwrap();
        assert_eq!(torus_trial(&p, 2, 3, 5, 42), torus_trial(&p, 2, 3, 5, 42));
        assert_ne!(torus_trial(&p, 2, 3, 5, 42), torus_trial(&p, 2, 3, 6, 42));
    }

    #[test]
    fn constant_frequency_family_has_zero_slope() {
        let pair = AdmissiblePair::new(Exponent::int(8), Exponent::int(4), 2, Class::Wave).unwrap();
        let ts = graded_times(1.0, 9);
        let ks = [3, 4, 5, 6];
        let q: Vec<f64> = ks
            .iter()
            .map(|_| strichartz_quotient(&SpectralData::Torus(TorusData::single(&[2, 1], Complex64::new(1.0, 0.0))), 1.0, &ts, &pair).unwrap())
            .collect();
        let f = loss_exponent_fit(&ks, &q).unwrap();
        assert!(f.slope.abs() < 1e-12);
        assert!(loss_exponent_fit(&ks[..3], &q[..3]).is_err());
    }

    #[test]
    fn zonal_family_on_the_two_sphere_grows_like_the_sogge_exponent() {
        let pair = AdmissiblePair::new(Exponent::int(4), Exponent::Infinite, 2, Class::Wave).unwrap();
        let ts = graded_times(1.0, 5);
        let ks = [4u32, 5, 6, 7];
        let q: Vec<f64> = ks
            .iter()
            .map(|k| {
                let u = ZonalData::single(2, 1 << k, Complex64::new(1.0, 0.0));
                strichartz_quotient(&SpectralData::Sphere(u), 0.0, &ts, &pair).unwrap()
            })
            .collect();
        let f = loss_exponent_fit(&ks, &q).unwrap();
        assert!(f.slope >= 0.5 - 0.05, "{f:?}");
    }

    #[test]
    fn small_torus_sweep_stays_below_the_predicted_loss() {
        let p = build_partition(8).unwrap();
        let pair = AdmissiblePair::new(Exponent::int(8), Exponent::int(4), 2, Class::Wave).unwrap();
        let r = torus_loss_sweep(2, 0.0, &pair, &p, &[2, 3, 4, 5], 4, 7, &graded_times(1.0, 33)).unwrap();
        assert!(r.fit.slope <= r.predicted_loss + 0.15, "{r:?}");
        assert!((r.predicted_loss - 0.375).abs() < 1e-15);
    }
}
