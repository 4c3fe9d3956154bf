//! Dispersive decay: maxima of `|L_h(t, x, y)|` over sampled `(x, y)` and the
//! least-squares fit `log|L| = c - α log h - β log(1 + t/h)`.

use super::kernel::{prepare_slice, KernelOptions, Window};
use crate::error::{LabError, Result};
use crate::fit::least_squares;
use crate::hamilton_jacobi::PhaseField;
use crate::linalg::Vector;
use num_complex::Complex64;

/// One maximum over the `(x, y)` sample set at fixed `(h, t)`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DecaySample {
    pub h: f64,
    pub t: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub value: Complex64,
    pub max_abs: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DecayFit {
    /// Exponent of `h`.
    pub alpha: f64,
    /// Exponent of `1 + t/h`.
    pub beta: f64,
    pub intercept: f64,
    /// RMS residual in log units.
    pub residual: f64,
    /// False when the residual exceeds 0.5.
    pub reliable: bool,
    pub samples: Vec<DecaySample>,
}

/// Fits `log|L| = c - α log h - β log(1 + t/h)`. Needs at least 3 distinct `h`
/// and at least 5 times per `h`.
pub fn decay_fit(samples: &[DecaySample]) -> Result<DecayFit> {
    let mut hs: Vec<f64> = samples.iter().map(|s| s.h).collect();
    hs.sort_by(f64::total_cmp);
    hs.dedup();
    if hs.len() < 3 {
        return Err(LabError::Underdetermined(format!("{} distinct h values, need 3", hs.len())));
    }
    for h in &hs {
        let mut ts: Vec<f64> = samples.iter().filter(|s| s.h == *h).map(|s| s.t).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        if ts.len() < 5 {
            return Err(LabError::Underdetermined(format!("{} distinct t values at h = {h}, need 5", ts.len())));
        }
    }
    if let Some(s) = samples.iter().find(|s| !(s.max_abs > 0.0)) {
        return Err(LabError::Domain(format!("non-positive kernel maximum at h = {}, t = {}", s.h, s.t)));
    }
    let rows: Vec<Vec<f64>> = samples.iter().map(|s| vec![1.0, -s.h.ln(), -(1.0 + s.t / s.h).ln()]).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.max_abs.ln()).collect();
    let (c, residual) = least_squares(&rows, &ys)?;
    Ok(DecayFit {
        alpha: c[1],
        beta: c[2],
        intercept: c[0],
        residual,
        reliable: residual <= 0.5,
        samples: samples.to_vec(),
    })
}

/// `count` geometrically spaced times in the window's fit range
/// (`[4h, t0]` for the wave window, `[4h, √h t0]` for the KG window).
pub fn window_times(window: Window, h: f64, t0: f64, count: usize) -> Result<Vec<f64>> {
    let (lo, hi) = (4.0 * h, window.limit(h, t0));
    if count < 2 || hi <= lo {
        return Err(LabError::Precondition(format!(
            "{window:?} fit range [{lo}, {hi}] at h = {h} cannot hold {count} distinct times"
        )));
    }
    let r = (hi / lo).ln() / (count - 1) as f64;
    Ok((0..count).map(|k| if k + 1 == count { hi } else { lo * (r * k as f64).exp() }).collect())
}

/// Sampling of the `(x, y)` set.
#[derive(Debug, Clone)]
pub struct SweepOptions<const D: usize> {
    /// Base points `x`.
    pub points: Vec<Vector<D>>,
    /// Uniform radial samples of `|y - x|` on `[0, 1.2 v t]`, `v` the largest group speed.
    pub radial_points: usize,
    /// Spacing of the refined band `[0.85 t, 1.05 v t]`, in units of `h`.
    pub band_spacing: f64,
    pub kernel: KernelOptions,
}

impl<const D: usize> Default for SweepOptions<D> {
    fn default() -> Self {
        SweepOptions { points: vec![Vector::<D>::zeros()], radial_points: 24, band_spacing: 0.125, kernel: KernelOptions::default() }
    }
}

/// Largest `|L_h(t, x, y)|` over the sample set. `y` runs along `x ± r e_a`;
/// ties keep the first sample in (point, axis, sign, radius) order.
pub fn max_kernel<const D: usize>(field: &PhaseField<D>, t: f64, opts: &SweepOptions<D>) -> Result<DecaySample> {
    let h = field.h();
    let speed = field
        .symbol
        .chart
        .global_ellipticity()
        .ok_or_else(|| LabError::InvalidParameter("decay sweep needs a globally elliptic chart".into()))?
        .sqrt();
    let reach = 1.2 * speed * t.abs();
    let mut radii: Vec<f64> = (0..opts.radial_points)
        .map(|k| reach * k as f64 / (opts.radial_points.max(2) - 1) as f64)
        .collect();
    let (b0, b1) = (0.85 * t.abs(), 1.05 * speed * t.abs());
    let step = opts.band_spacing * h;
    let nb = ((b1 - b0) / step).floor() as usize;
    radii.extend((0..=nb).map(|k| b0 + k as f64 * step));
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let mut signed = Vec::with_capacity(2 * radii.len());
    for sign in [1.0, -1.0] {
        signed.extend(radii.iter().map(|r| sign * r));
    }
    let mut best: Option<DecaySample> = None;
    for x in &opts.points {
        let slice = prepare_slice(field, None, t, x, reach, &opts.kernel)?;
        for axis in 0..D {
            let prof = slice.axis_profile(axis, &signed)?;
            for (r, v) in signed.iter().zip(prof) {
                if best.as_ref().map_or(true, |b| v.norm() > b.max_abs) {
                    let mut y = *x;
                    y[axis] += r;
                    best = Some(DecaySample {
                        h,
                        t,
                        x: x.iter().copied().collect(),
                        y: y.iter().copied().collect(),
                        value: v,
                        max_abs: v.norm(),
                    });
                }
            }
        }
    }
    best.ok_or_else(|| LabError::InvalidParameter("empty (x, y) sample set".into()))
}

/// Kernel maxima for each field (one per `h`) at `count` times in the window.
pub fn decay_sweep<const D: usize>(
    fields: &[PhaseField<D>],
    window: Window,
    count: usize,
    opts: &SweepOptions<D>,
) -> Result<Vec<DecaySample>> {
    let mut out = Vec::new();
    for field in fields {
        for t in window_times(window, field.h(), field.t_max, count)? {
            out.push(max_kernel(field, t, opts)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(alpha: f64, beta: f64, noise: f64) -> Vec<DecaySample> {
        let mut v = Vec::new();
        for (i, h) in [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0].iter().enumerate() {
            for (j, t) in window_times(Window::Wave, *h, 1.0, 5).unwrap().into_iter().enumerate() {
                let wobble = noise * (((i * 5 + j) % 3) as f64 - 1.0);
                let m = (2.0 - alpha * h.ln() - beta * (1.0 + t / h).ln() + wobble).exp();
                v.push(DecaySample { h: *h, t, x: vec![0.0], y: vec![0.0], value: Complex64::new(m, 0.0), max_abs: m });
            }
        }
        v
    }

    #[test]
    fn recovers_exact_exponents() {
        let f = decay_fit(&synthetic(2.0, 0.5, 0.0)).unwrap();
        assert!((f.alpha - 2.0).abs() < 1e-10 && (f.beta - 0.5).abs() < 1e-10 && f.reliable);
    }

    #[test]
    fn large_residual_is_flagged() {
        let f = decay_fit(&synthetic(2.0, 0.5, 2.0)).unwrap();
        assert!(!f.reliable);
    }

    #[test]
    fn single_h_single_t_is_underdetermined() {
        let s = synthetic(2.0, 0.5, 0.0);
        assert!(matches!(decay_fit(&s[..1]), Err(LabError::Underdetermined(_))));
        assert!(matches!(decay_fit(&s[..5]), Err(LabError::Underdetermined(_))));
    }

    #[test]
    fn window_ranges() {
        let ts = window_times(Window::Kg, 1.0 / 64.0, 1.0, 5).unwrap();
        assert!((ts[0] - 1.0 / 16.0).abs() < 1e-15 && (ts[4] - 0.125).abs() < 1e-15);
        assert!(window_times(Window::Kg, 1.0 / 16.0, 1.0, 5).is_err());
    }
}
