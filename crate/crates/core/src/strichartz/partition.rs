//! Dyadic Littlewood-Paley partition `φ̃(λ) + Σ_{k>=1} φ(2^{-2k} λ) = 1`,
//! obtained by telescoping the smooth cutoff `χ` (1 on `[0, 1]`, 0 on `[2, ∞)`):
//! `φ̃ = χ` and `φ(μ) = χ(μ) - χ(4μ)`, so that shell `k` carries the
//! frequencies `2^{k-1} < |n| < 2^{k+1/2}`.

use crate::cutoff::smooth_step;
use crate::error::{LabError, Result};

/// `χ(λ) = 1 - step(λ - 1)`.
pub fn chi(lambda: f64) -> f64 {
    1.0 - smooth_step(lambda - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicPartition {
    pub k_max: u32,
}

impl DyadicPartition {
    /// The low-frequency piece `φ̃`.
    pub fn low(&self, lambda: f64) -> f64 {
        chi(lambda)
    }

    /// The annulus bump `φ`, supported in `(1/4, 2)`.
    pub fn annulus(&self, mu: f64) -> f64 {
        chi(mu) - chi(4.0 * mu)
    }

    /// `φ(2^{-2k} λ)`.
    pub fn shell(&self, k: u32, lambda: f64) -> f64 {
        self.annulus(lambda / 4f64.powi(k as i32))
    }

    /// `φ̃(λ) + Σ_{k=1}^{K} φ(2^{-2k} λ)`.
    pub fn partial_sum(&self, k_max: u32, lambda: f64) -> f64 {
        self.low(lambda) + (1..=k_max).map(|k| self.shell(k, lambda)).sum::<f64>()
    }

    /// Largest deviation of the full sum from 1 on a log grid of `[0, 2^{2K-1}]`.
    pub fn identity_defect(&self) -> f64 {
        let top = 2f64.powi(2 * self.k_max as i32 - 1);
        let mut worst = (self.partial_sum(self.k_max, 0.0) - 1.0).abs();
        let n = 4000;
        for j in 0..=n {
            let lambda = 1e-3 * (top / 1e-3).powf(j as f64 / n as f64);
            worst = worst.max((self.partial_sum(self.k_max, lambda) - 1.0).abs());
        }
        worst
    }
}

pub fn build_partition(k_max: u32) -> Result<DyadicPartition> {
    if k_max < 1 {
        return Err(LabError::InvalidParameter("K_max must be >= 1".into()));
    }
    let p = DyadicPartition { k_max };
    let defect = p.identity_defect();
    if defect > 1e-10 {
        return Err(LabError::Domain(format!("partition identity violated by {defect:e}")));
    }
    Ok(p)
}
