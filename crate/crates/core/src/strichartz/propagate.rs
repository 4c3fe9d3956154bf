//! Exact spectral propagators `e^{it√(m² + Δ_eig)}` on the flat torus
//! `(ℝ/2πℤ)^d` and on zonal functions of the round sphere `S^d`.
//!
//! Both models carry the normalized (probability) measure, so a single torus
//! mode and the normalized zonal harmonics have unit `L²` norm.

use crate::error::{LabError, Result};
use crate::quadrature::GaussLegendre;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Model {
    Torus { d: usize },
    Sphere { d: usize },
}

/// A trigonometric polynomial `Σ c_n e^{in·x}` on `(ℝ/2πℤ)^d`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TorusData {
    pub d: usize,
    pub modes: BTreeMap<Vec<i64>, Complex64>,
}

impl TorusData {
    pub fn new(d: usize) -> Self {
        TorusData { d, modes: BTreeMap::new() }
    }

    pub fn single(n: &[i64], c: Complex64) -> Self {
        let mut s = TorusData::new(n.len());
        s.modes.insert(n.to_vec(), c);
        s
    }

    /// Largest `|n_i|` present.
    pub fn max_frequency(&self) -> i64 {
        self.modes.keys().flatten().map(|v| v.abs()).max().unwrap_or(0)
    }

    /// `L²` norm, by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.modes.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplies `c_n` by `m(|n|²)`.
    pub fn apply_multiplier(&self, m: impl Fn(f64) -> f64) -> TorusData {
        let modes = self
            .modes
            .iter()
            .map(|(n, c)| (n.clone(), c * m(n.iter().map(|v| (v * v) as f64).sum())))
            .collect();
        TorusData { d: self.d, modes }
    }

    /// `c_n ↦ e^{it√(m² + |n|²)} c_n`.
    pub fn propagate(&self, mass: f64, t: f64) -> TorusData {
        let modes = self
            .modes
            .iter()
            .map(|(n, c)| {
                let lam: f64 = n.iter().map(|v| (v * v) as f64).sum();
                (n.clone(), c * Complex64::from_polar(1.0, t * (mass * mass + lam).sqrt()))
            })
            .collect();
        TorusData { d: self.d, modes }
    }

    /// Grid size for [`TorusData::synthesize`]: the smallest 5-smooth size
    /// above `4·max|n_i|`, so that `∫|u|^4` is integrated exactly.
    pub fn grid_size(&self) -> usize {
        let smooth = |mut n: usize| {
            for f in [2, 3, 5] {
                while n % f == 0 {
                    n /= f;
                }
            }
            n == 1
        };
        (4 * self.max_frequency() as usize + 1..).find(|&n| smooth(n)).unwrap().max(8)
    }

    /// Point values on the uniform grid `x_j = 2πj/N` (row-major, last index fastest).
    pub fn synthesize(&self, n_grid: usize) -> Result<Vec<Complex64>> {
        let d = self.d;
        if 2 * self.max_frequency() as usize >= n_grid {
            return Err(LabError::InvalidParameter(format!(
                "grid of {n_grid} points aliases frequency {}",
                self.max_frequency()
            )));
        }
        let total = n_grid.pow(d as u32);
        let mut buf = vec![Complex64::new(0.0, 0.0); total];
        for (n, c) in &self.modes {
            let idx = n.iter().fold(0usize, |acc, v| acc * n_grid + v.rem_euclid(n_grid as i64) as usize);
            buf[idx] += c;
        }
        // FFT along the contiguous last axis, then rotate it to the front;
        // after d rounds every axis is transformed and the order is restored.
        let fft = FftPlanner::<f64>::new().plan_fft_inverse(n_grid);
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let mut rotated = vec![Complex64::new(0.0, 0.0); total];
        for _ in 0..d {
            fft.process_with_scratch(&mut buf, &mut scratch);
            transpose::transpose(&buf, &mut rotated, n_grid, total / n_grid);
            std::mem::swap(&mut buf, &mut rotated);
        }
        Ok(buf)
    }
}

/// A zonal function `Σ c_k Z_k(θ)` on `S^d`, `Z_k` the `L²`-normalized zonal
/// harmonic of degree `k` (eigenvalue `k(k + d - 1)`).
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalData {
    pub d: usize,
    pub coeffs: BTreeMap<usize, Complex64>,
}

/// Gegenbauer polynomials `C_0^λ, ..., C_n^λ` at `x` (Legendre for `λ = 1/2`).
pub fn gegenbauer_all(n: usize, lambda: f64, x: f64) -> Vec<f64> {
    let mut v = vec![1.0];
    if n >= 1 {
        v.push(2.0 * lambda * x);
    }
    for k in 1..n {
        let kf = k as f64;
        v.push((2.0 * x * (kf + lambda) * v[k] - (kf + 2.0 * lambda - 1.0) * v[k - 1]) / (kf + 1.0));
    }
    v
}

/// Quadrature for the normalized measure `sin^{d-1}θ dθ / ∫ sin^{d-1}` on `[0, π]`,
/// with the north pole added at weight zero so that grid maxima see it.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub d: usize,
    pub theta: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SphereGrid {
    pub fn new(d: usize, nodes: usize) -> Self {
        let gl = GaussLegendre::new(nodes);
        let (th, w) = gl.on_interval(0.0, std::f64::consts::PI);
        let raw: Vec<f64> = th.iter().zip(&w).map(|(t, w)| w * t.sin().powi(d as i32 - 1)).collect();
        let total: f64 = raw.iter().sum();
        let mut theta = vec![0.0];
        theta.extend(th);
        let mut weights = vec![0.0];
        weights.extend(raw.iter().map(|v| v / total));
        SphereGrid { d, theta, weights }
    }
}

impl ZonalData {
    pub fn single(d: usize, k: usize, c: Complex64) -> Self {
        ZonalData { d, coeffs: BTreeMap::from([(k, c)]) }
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.keys().copied().max().unwrap_or(0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn propagate(&self, mass: f64, t: f64) -> ZonalData {
        let d = self.d as f64;
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, c)| {
                let kf = *k as f64;
                (*k, c * Complex64::from_polar(1.0, t * (mass * mass + kf * (kf + d - 1.0)).sqrt()))
            })
            .collect();
        ZonalData { d: self.d, coeffs }
    }

    /// A grid that integrates `|u|²` exactly up to rounding.
    pub fn default_grid(&self) -> SphereGrid {
        SphereGrid::new(self.d, 2 * self.max_degree() + self.d + 16)
    }

    /// Point values on `grid`. The zonal harmonics are normalized against the
    /// grid's own quadrature.
    pub fn synthesize(&self, grid: &SphereGrid) -> Vec<Complex64> {
        let lambda = (self.d as f64 - 1.0) / 2.0;
        let kmax = self.max_degree();
        let table: Vec<Vec<f64>> = grid.theta.iter().map(|t| gegenbauer_all(kmax, lambda, t.cos())).collect();
        let norms: BTreeMap<usize, f64> = self
            .coeffs
            .keys()
            .map(|k| {
                let s: f64 = table.iter().zip(&grid.weights).map(|(row, w)| w * row[*k] * row[*k]).sum();
                (*k, s.sqrt())
            })
            .collect();
        table
            .iter()
            .map(|row| self.coeffs.iter().map(|(k, c)| c * (row[*k] / norms[k])).sum())
            .collect()
    }
}

/// Spectral data on either model.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralData {
    Torus(TorusData),
    Sphere(ZonalData),
}

impl SpectralData {
    pub fn model(&self) -> Model {
        match self {
            SpectralData::Torus(u) => Model::Torus { d: u.d },
            SpectralData::Sphere(u) => Model::Sphere { d: u.d },
        }
    }

    pub fn l2_norm(&self) -> f64 {
        match self {
            SpectralData::Torus(u) => u.l2_norm(),
            SpectralData::Sphere(u) => u.l2_norm(),
        }
    }
}

/// Quadrature weights of a spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    /// Every point carries the same weight.
    Uniform(f64),
    Nodes(Vec<f64>),
}

impl Weights {
    pub fn get(&self, i: usize) -> f64 {
        match self {
            Weights::Uniform(w) => *w,
            Weights::Nodes(w) => w[i],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialSamples {
    pub values: Vec<Complex64>,
    pub weights: Weights,
}

/// `e^{it√(m² + λ)}` applied in the eigenbasis, then point values on the
/// model's default grid.
pub fn spectral_propagate(data: &SpectralData, mass: f64, t: f64) -> Result<SpatialSamples> {
    match data {
        SpectralData::Torus(u) => {
            let n = u.grid_size();
            let values = u.propagate(mass, t).synthesize(n)?;
            let w = 1.0 / values.len() as f64;
            Ok(SpatialSamples { values, weights: Weights::Uniform(w) })
        }
        SpectralData::Sphere(u) => {
            let grid = u.default_grid();
            let values = u.propagate(mass, t).synthesize(&grid);
            Ok(SpatialSamples { values, weights: Weights::Nodes(grid.weights) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_torus_mode_evolves_by_a_phase() {
        let n = [3i64, -2];
        let u = TorusData::single(&n, Complex64::new(1.0, 0.0));
        let (m, t) = (1.0, 0.7);
        let v = u.propagate(m, t);
        let ng = 16;
        let s = v.synthesize(ng).unwrap();
        let w = (m * m + 13.0f64).sqrt();
        for j0 in 0..ng {
            for j1 in 0..ng {
                let x = [2.0 * std::f64::consts::PI * j0 as f64 / ng as f64, 2.0 * std::f64::consts::PI * j1 as f64 / ng as f64];
                let expect = Complex64::from_polar(1.0, t * w + 3.0 * x[0] - 2.0 * x[1]);
                assert!((s[j0 * ng + j1] - expect).norm() < 1e-12);
            }
        }
        assert_eq!(u.propagate(m, 0.0), u);
        assert!(u.synthesize(4).is_err());
    }

    #[test]
    fn l2_norm_is_conserved() {
        let mut u = TorusData::new(2);
        for (i, n) in [[1, 0], [0, 5], [-3, 4], [7, -7]].iter().enumerate() {
            u.modes.insert(n.to_vec(), Complex64::new(i as f64 + 0.5, -(i as f64)));
        }
        let ng = u.grid_size();
        for t in [0.0, 0.3, 1.7, 10.0] {
            let s = u.propagate(0.5, t).synthesize(ng).unwrap();
            let l2 = (s.iter().map(|v| v.norm_sqr()).sum::<f64>() / s.len() as f64).sqrt();
            assert!((l2 - u.l2_norm()).abs() < 1e-12 * u.l2_norm());
        }
    }

    #[test]
    fn propagation_commutes_with_shell_multipliers() {
        let p = crate::strichartz::partition::build_partition(6).unwrap();
        let mut u = TorusData::new(2);
        for a in -9..=9i64 {
            for b in -9..=9i64 {
                u.modes.insert(vec![a, b], Complex64::new((a * b) as f64, a as f64));
            }
        }
        let lhs = u.apply_multiplier(|l| p.shell(3, l)).propagate(1.0, 0.4);
        let rhs = u.propagate(1.0, 0.4).apply_multiplier(|l| p.shell(3, l));
        // the multiplier and the phase act diagonally: same support, same values up to rounding
        let support = |u: &TorusData| u.modes.iter().filter(|(_, c)| c.norm() != 0.0).map(|(n, _)| n.clone()).collect::<Vec<_>>();
        assert_eq!(support(&lhs), support(&rhs));
        for (n, c) in &lhs.modes {
            assert!((c - rhs.modes[n]).norm() <= 1e-15 * (1.0 + c.norm()));
        }
    }

    #[test]
    fn zonal_harmonics_are_orthonormal_and_legendre_on_the_two_sphere() {
        let grid = SphereGrid::new(2, 80);
        let z = ZonalData::single(2, 5, Complex64::new(1.0, 0.0)).synthesize(&grid);
        // north pole value √(2k+1)
        assert!((z[0].re - 11f64.sqrt()).abs() < 1e-12);
        for d in [2, 3, 4, 5] {
            let grid = SphereGrid::new(d, 80);
            let a = ZonalData::single(d, 4, Complex64::new(1.0, 0.0)).synthesize(&grid);
            let b = ZonalData::single(d, 7, Complex64::new(1.0, 0.0)).synthesize(&grid);
            let ip: Complex64 = a.iter().zip(&b).zip(&grid.weights).map(|((x, y), w)| x * y.conj() * *w).sum();
            let nn: f64 = a.iter().zip(&grid.weights).map(|(x, w)| x.norm_sqr() * w).sum();
            assert!(ip.norm() < 1e-12 && (nn - 1.0).abs() < 1e-12);
        }
    }
}
