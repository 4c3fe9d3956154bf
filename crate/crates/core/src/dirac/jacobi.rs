//! Jacobi polynomials `P_n^{(α,β)}` by the three-term recurrence in the degree.

use crate::error::{LabError, Result};

/// Value of `P_n^{(α,β)}(x)`.
pub fn jacobi_value(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ab = alpha + beta;
    let mut p0 = 1.0;
    let mut p1 = (alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (alpha * alpha - beta * beta);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c;
        let p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `(P_n, dP_n/dx)` with the derivative from the shift identity
/// `d/dx P_n^{(α,β)} = (n+α+β+1)/2 · P_{n-1}^{(α+1,β+1)}`.
pub fn jacobi(n: usize, alpha: f64, beta: f64, x: f64) -> (f64, f64) {
    let value = jacobi_value(n, alpha, beta, x);
    let derivative = if n == 0 {
        0.0
    } else {
        0.5 * (n as f64 + alpha + beta + 1.0) * jacobi_value(n - 1, alpha + 1.0, beta + 1.0, x)
    };
    (value, derivative)
}

/// `(P_n, P_n', P_n'')`, the second derivative by applying the shift twice.
pub fn jacobi_with_second(n: usize, alpha: f64, beta: f64, x: f64) -> (f64, f64, f64) {
    let (v, d1) = jacobi(n, alpha, beta, x);
    let d2 = if n < 2 {
        0.0
    } else {
        let s = n as f64 + alpha + beta;
        0.25 * (s + 1.0) * (s + 2.0) * jacobi_value(n - 2, alpha + 2.0, beta + 2.0, x)
    };
    (v, d1, d2)
}

/// Checked entry point: rejects parameters outside `α, β > -1`, `x ∈ [-1, 1]`.
pub fn jacobi_checked(n: usize, alpha: f64, beta: f64, x: f64) -> Result<(f64, f64)> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(LabError::InvalidParameter(format!("Jacobi parameters must exceed -1, got ({alpha}, {beta})")));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(LabError::Domain(format!("Jacobi argument {x} outside [-1, 1]")));
    }
    Ok(jacobi(n, alpha, beta, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;

    #[test]
    fn closed_forms() {
        for &x in &[-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_eq!(jacobi(0, 0.4, 1.3, x), (1.0, 0.0));
            let (v, d) = jacobi(1, 0.0, 1.0, x);
            assert!((v - (3.0 * x - 1.0) / 2.0).abs() < 1e-15);
            assert!((d - 1.5).abs() < 1e-15);
            // Legendre special case
            let (v, _) = jacobi(2, 0.0, 0.0, x);
            assert!((v - (3.0 * x * x - 1.0) / 2.0).abs() < 1e-14);
        }
        // P_n^{(α,β)}(1) = binom(n + α, n)
        assert!((jacobi_value(5, 2.0, 0.5, 1.0) - 21.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonality_by_gauss_quadrature() {
        let (a, b) = (1.0, 2.0);
        let gl = GaussLegendre::new(40);
        let w = |x: f64| (1.0 - x).powf(a) * (1.0 + x).powf(b);
        let ip = gl.integrate(-1.0, 1.0, |x| jacobi_value(2, a, b, x) * jacobi_value(3, a, b, x) * w(x));
        assert!(ip.abs() < 1e-12, "{ip}");
        let norm = gl.integrate(-1.0, 1.0, |x| jacobi_value(3, a, b, x).powi(2) * w(x));
        assert!(norm > 0.1);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let e = 1e-5;
        for &(n, a, b) in &[(4usize, 1.0, 2.0), (7, 0.5, 1.5), (12, 3.0, 2.0)] {
            for &x in &[-0.6, 0.1, 0.8] {
                let (_, d1, d2) = jacobi_with_second(n, a, b, x);
                let fd1 = (jacobi_value(n, a, b, x + e) - jacobi_value(n, a, b, x - e)) / (2.0 * e);
                let fd2 = (jacobi_value(n, a, b, x + e) - 2.0 * jacobi_value(n, a, b, x) + jacobi_value(n, a, b, x - e)) / (e * e);
                assert!((d1 - fd1).abs() < 1e-6 * (1.0 + d1.abs()));
                assert!((d2 - fd2).abs() < 1e-3 * (1.0 + d2.abs()));
            }
        }
    }

    #[test]
    fn checked_rejects_out_of_domain() {
        assert!(jacobi_checked(3, -1.0, 0.0, 0.0).is_err());
        assert!(jacobi_checked(3, 0.0, 0.0, 1.5).is_err());
        assert!(jacobi_checked(3, 0.0, 0.0, 1.0).is_ok());
    }
}
