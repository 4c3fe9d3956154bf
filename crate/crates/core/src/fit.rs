//! Linear least squares for exponent fits.

use crate::error::{LabError, Result};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the residuals.
    pub residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let rows: Vec<Vec<f64>> = xs.iter().map(|x| vec![1.0, *x]).collect();
    let (c, residual) = least_squares(&rows, ys)?;
    Ok(LineFit { slope: c[1], intercept: c[0], residual })
}

/// Solves `min |A c - y|` by SVD; returns the coefficients and the RMS residual.
pub fn least_squares(rows: &[Vec<f64>], ys: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = rows.len();
    let k = rows.first().map_or(0, |r| r.len());
    if n != ys.len() {
        return Err(LabError::InvalidParameter(format!("{n} rows but {} targets", ys.len())));
    }
    if n < k || k == 0 {
        return Err(LabError::Underdetermined(format!("{n} samples for {k} unknowns")));
    }
    if ys.iter().chain(rows.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(LabError::Domain("non-finite value in least-squares data".into()));
    }
    let a = DMatrix::from_fn(n, k, |i, j| rows[i][j]);
    let y = DVector::from_column_slice(ys);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|s| **s > 1e-10 * smax).count();
    if rank < k {
        return Err(LabError::Underdetermined(format!(
            "design matrix has rank {rank} < {k} unknowns"
        )));
    }
    let c = svd
        .solve(&y, 1e-12 * smax)
        .map_err(|e| LabError::Domain(format!("least squares failed: {e}")))?;
    let r = &a * &c - &y;
    let rms = (r.norm_squared() / n as f64).sqrt();
    Ok((c.iter().copied().collect(), rms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert!((f.slope - 2.5).abs() < 1e-12);
        assert!((f.intercept + 1.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn single_point_is_underdetermined() {
        assert!(matches!(fit_line(&[1.0], &[2.0]), Err(LabError::Underdetermined(_))));
        assert!(matches!(fit_line(&[1.0, 1.0], &[2.0, 3.0]), Err(LabError::Underdetermined(_))));
    }
}
