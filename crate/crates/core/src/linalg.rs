//! Small fixed-size helpers on top of nalgebra's statically sized types.

use nalgebra::{DMatrix, SMatrix, SVector};

pub type Vector<const D: usize> = SVector<f64, D>;
pub type Matrix<const D: usize> = SMatrix<f64, D, D>;

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn inverse<const D: usize>(m: &Matrix<D>) -> Option<Matrix<D>> {
    let mut a = *m;
    let mut inv = Matrix::<D>::identity();
    let scale = m.amax().max(f64::MIN_POSITIVE);
    for col in 0..D {
        let mut pivot = col;
        for r in col + 1..D {
            if a[(r, col)].abs() > a[(pivot, col)].abs() {
                pivot = r;
            }
        }
        if a[(pivot, col)].abs() <= 1e-300 * scale || !a[(pivot, col)].is_finite() {
            return None;
        }
        a.swap_rows(col, pivot);
        inv.swap_rows(col, pivot);
        let p = 1.0 / a[(col, col)];
        for c in 0..D {
            a[(col, c)] *= p;
            inv[(col, c)] *= p;
        }
        for r in 0..D {
            if r != col {
                let f = a[(r, col)];
                if f != 0.0 {
                    for c in 0..D {
                        a[(r, c)] -= f * a[(col, c)];
                        inv[(r, c)] -= f * inv[(col, c)];
                    }
                }
            }
        }
    }
    Some(inv)
}

pub fn determinant<const D: usize>(m: &Matrix<D>) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for col in 0..D {
        let mut pivot = col;
        for r in col + 1..D {
            if a[(r, col)].abs() > a[(pivot, col)].abs() {
                pivot = r;
            }
        }
        if a[(pivot, col)] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap_rows(col, pivot);
            det = -det;
        }
        det *= a[(col, col)];
        for r in col + 1..D {
            let f = a[(r, col)] / a[(col, col)];
            for c in col..D {
                a[(r, c)] -= f * a[(col, c)];
            }
        }
    }
    det
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues<const D: usize>(m: &Matrix<D>) -> Vec<f64> {
    let dm = DMatrix::from_fn(D, D, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let mut ev: Vec<f64> = dm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Spectral norm (largest singular value).
pub fn spectral_norm<const D: usize>(m: &Matrix<D>) -> f64 {
    let dm = DMatrix::from_fn(D, D, |i, j| m[(i, j)]);
    dm.singular_values().max()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_determinant_agree_with_nalgebra() {
        let m = Matrix::<3>::new(2.0, 1.0, 0.5, 0.0, 3.0, 1.0, 1.0, 0.2, 4.0);
        let inv = inverse(&m).unwrap();
        assert!((m * inv - Matrix::<3>::identity()).amax() < 1e-14);
        assert!((determinant(&m) - m.determinant()).abs() < 1e-12);
        assert!(inverse(&Matrix::<2>::zeros()).is_none());
    }

    #[test]
    fn norms_and_spectra() {
        let m = Matrix::<2>::new(0.6, 0.8, 0.8, -0.6);
        let ev = symmetric_eigenvalues(&m);
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        assert!((spectral_norm(&m) - 1.0).abs() < 1e-14);
    }
}
