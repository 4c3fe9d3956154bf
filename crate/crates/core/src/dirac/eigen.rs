//! Spinor eigenfunctions of the Dirac operator on `S^d`, radial part only.
//!
//! With `c = cos(θ/2)`, `s = sin(θ/2)` and `μ = d/2 + ℓ`, the radial parts are
//! `φ = c^{ℓ+1} s^ℓ P_{n-ℓ}^{(μ-1, μ)}(cos θ)` and
//! `ψ = c^ℓ s^{ℓ+1} P_{n-ℓ}^{(μ, μ-1)}(cos θ)`, with eigenvalue `±(n + d/2)`.

use super::jacobi::jacobi_with_second;
use crate::error::{LabError, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Which radial component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Phi,
    Psi,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinorEigenfunction {
    pub d: usize,
    pub n: usize,
    pub l: usize,
    pub sign: Sign,
    pub norm_const: f64,
    pub eigenvalue: f64,
}

/// `ln Γ(k/2)` for a positive integer `k`, exact recursion from `Γ(1) = 1`
/// and `Γ(1/2) = √π`.
pub fn ln_gamma_half(k: usize) -> f64 {
    assert!(k > 0, "Γ(0) is undefined");
    let (mut acc, mut x) = if k % 2 == 0 { (0.0, 1.0) } else { (0.5 * std::f64::consts::PI.ln(), 0.5) };
    while 2.0 * x < k as f64 {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

/// `C_d(n, ℓ) = √((n-ℓ)! Γ(n+ℓ+d)) / (2^{d/2-1} Γ(n+d/2))`, which makes the
/// radial mass `∫ (C²/2)(φ² + ψ²) sin^{d-1}θ dθ` equal to one. For `d = 2` it
/// reduces to `√((n-ℓ)!(n+ℓ+1)!)/n!`.
pub fn norm_constant(d: usize, n: usize, l: usize) -> f64 {
    let ln_num = 0.5 * (ln_gamma_half(2 * (n - l + 1)) + ln_gamma_half(2 * (n + l + d)));
    let ln_den = (d as f64 / 2.0 - 1.0) * std::f64::consts::LN_2 + ln_gamma_half(2 * n + d);
    (ln_num - ln_den).exp()
}

pub fn eigenfunction(d: usize, n: usize, l: usize, sign: Sign) -> Result<SpinorEigenfunction> {
    if d < 2 {
        return Err(LabError::InvalidParameter(format!("sphere dimension must be at least 2, got {d}")));
    }
    if n < l {
        return Err(LabError::InvalidParameter(format!("regular eigenfunctions need n >= l, got n = {n}, l = {l}")));
    }
    Ok(SpinorEigenfunction {
        d,
        n,
        l,
        sign,
        norm_const: norm_constant(d, n, l),
        eigenvalue: sign.value() * (n as f64 + d as f64 / 2.0),
    })
}

/// Radial profile and its first two θ-derivatives.
#[derive(Debug, Clone, Copy)]
struct Jet {
    v: f64,
    d1: f64,
    d2: f64,
}

impl SpinorEigenfunction {
    fn params(&self, c: Component) -> (i32, i32, f64, f64) {
        let mu = self.d as f64 / 2.0 + self.l as f64;
        let l = self.l as i32;
        match c {
            Component::Phi => (l + 1, l, mu - 1.0, mu),
            Component::Psi => (l, l + 1, mu, mu - 1.0),
        }
    }

    pub fn radial(&self, c: Component, theta: f64) -> f64 {
        let (a, b, al, be) = self.params(c);
        let (p, _, _) = jacobi_with_second(self.n - self.l, al, be, theta.cos());
        (theta / 2.0).cos().powi(a) * (theta / 2.0).sin().powi(b) * p
    }

    pub fn phi(&self, theta: f64) -> f64 {
        self.radial(Component::Phi, theta)
    }

    pub fn psi(&self, theta: f64) -> f64 {
        self.radial(Component::Psi, theta)
    }

    /// `(C²/2)(φ² + ψ²)`, the pointwise squared modulus up to the angular factor.
    pub fn density(&self, theta: f64) -> f64 {
        0.5 * self.norm_const * self.norm_const * (self.phi(theta).powi(2) + self.psi(theta).powi(2))
    }

    /// The radial part divided by the half-angle prefactor `g`, with the jet
    /// of `ln g` folded in; valid away from the poles.
    fn jet(&self, c: Component, theta: f64) -> (f64, Jet) {
        let (a, b, al, be) = self.params(c);
        let (a, b) = (a as f64, b as f64);
        let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let g = ch.powf(a) * sh.powf(b);
        let u = -0.5 * a * sh / ch + 0.5 * b * ch / sh;
        let du = -0.25 * a / (ch * ch) - 0.25 * b / (sh * sh);
        let (x, st) = (theta.cos(), theta.sin());
        let (p, dp, ddp) = jacobi_with_second(self.n - self.l, al, be, x);
        let pt = -st * dp;
        let ptt = st * st * ddp - x * dp;
        (g, Jet { v: p, d1: u * p + pt, d2: (u * u + du) * p + 2.0 * u * pt + ptt })
    }

    /// Residual of the squared radial equation at `θ` for eigenvalue `λ`,
    /// divided by the prefactor `g`:
    /// `[(∂ + κ cot)² - (ℓ+κ)²/sin² ± (ℓ+κ) cos/sin²] f + λ² f`, `κ = (d-1)/2`,
    /// with `+` for `φ` and `-` for `ψ`.
    fn residual_at(&self, c: Component, theta: f64, lambda: f64) -> (f64, f64) {
        let (g, j) = self.jet(c, theta);
        let kappa = (self.d as f64 - 1.0) / 2.0;
        let lk = self.l as f64 + kappa;
        let (st, ct) = (theta.sin(), theta.cos());
        let cot = ct / st;
        let s2 = st * st;
        let sgn = if c == Component::Phi { 1.0 } else { -1.0 };
        let r = j.d2 + 2.0 * kappa * cot * j.d1 + (kappa * kappa * cot * cot - kappa / s2) * j.v
            - lk * lk / s2 * j.v
            + sgn * lk * ct / s2 * j.v
            + lambda * lambda * j.v;
        (g * r, g * j.v)
    }
}

/// Maximum over the grid of `|residual| / max|f|` for both radial components,
/// using the eigenvalue stored in `f`.
pub fn radial_ode_residual(f: &SpinorEigenfunction, thetas: &[f64]) -> Result<f64> {
    radial_ode_residual_with(f, thetas, f.eigenvalue)
}

/// As [`radial_ode_residual`] with an explicit eigenvalue.
pub fn radial_ode_residual_with(f: &SpinorEigenfunction, thetas: &[f64], lambda: f64) -> Result<f64> {
    const MARGIN: f64 = 1e-3;
    let (lo, hi) = (MARGIN * (1.0 - 1e-9), std::f64::consts::PI - MARGIN * (1.0 - 1e-9));
    if thetas.iter().any(|t| !(lo..=hi).contains(t)) {
        return Err(LabError::Domain(format!("θ grid must stay {MARGIN} away from the poles")));
    }
    let mut worst = 0.0f64;
    for c in [Component::Phi, Component::Psi] {
        let (mut rmax, mut fmax) = (0.0f64, 0.0f64);
        for &t in thetas {
            let (r, v) = f.residual_at(c, t, lambda);
            rmax = rmax.max(r.abs());
            fmax = fmax.max(v.abs());
        }
        worst = worst.max(rmax / fmax);
    }
    Ok(worst)
}

/// Uniform θ grid with `count` points on `[margin, π - margin]`.
pub fn interior_grid(count: usize, margin: f64) -> Vec<f64> {
    let span = std::f64::consts::PI - 2.0 * margin;
    (0..count).map(|i| margin + span * i as f64 / (count - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;

    #[test]
    fn half_integer_gamma() {
        assert!((ln_gamma_half(1) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-15);
        assert!((ln_gamma_half(10) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma_half(7) - (15.0 / 8.0 * std::f64::consts::PI.sqrt()).ln()).abs() < 1e-13);
    }

    #[test]
    fn two_sphere_examples() {
        let f = eigenfunction(2, 0, 0, Sign::Plus).unwrap();
        assert!((f.norm_const - 1.0).abs() < 1e-15);
        assert_eq!(f.eigenvalue, 1.0);
        assert_eq!(eigenfunction(2, 0, 0, Sign::Minus).unwrap().eigenvalue, -1.0);
        for &t in &[0.2, 1.0, 2.5] {
            assert!((f.phi(t) - (t / 2.0).cos()).abs() < 1e-15);
            assert!((f.psi(t) - (t / 2.0).sin()).abs() < 1e-15);
        }
        assert!((eigenfunction(2, 1, 0, Sign::Plus).unwrap().norm_const - 2f64.sqrt()).abs() < 1e-14);
        assert!(eigenfunction(3, 1, 2, Sign::Plus).is_err());
    }

    #[test]
    fn factorial_constant_agrees_in_two_dimensions() {
        let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
        for n in 0..8 {
            for l in 0..=n {
                let closed = (fact(n - l) * fact(n + l + 1)).sqrt() / fact(n);
                assert!((norm_constant(2, n, l) / closed - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn unit_mass_small_cases() {
        let gl = GaussLegendre::new(120);
        for d in 2..=5 {
            for n in 0..6 {
                for l in 0..=n {
                    let f = eigenfunction(d, n, l, Sign::Plus).unwrap();
                    let m = gl.integrate(0.0, std::f64::consts::PI, |t| f.density(t) * t.sin().powi(d as i32 - 1));
                    assert!((m - 1.0).abs() < 1e-10, "d {d} n {n} l {l}: {m}");
                }
            }
        }
    }

    #[test]
    fn ode_residual_examples() {
        let grid = interior_grid(200, 1e-3);
        let f = eigenfunction(2, 0, 0, Sign::Plus).unwrap();
        assert!(radial_ode_residual(&f, &grid).unwrap() < 1e-10);
        let f = eigenfunction(4, 3, 1, Sign::Minus).unwrap();
        assert!(radial_ode_residual(&f, &grid).unwrap() < 1e-6);
        let wrong = radial_ode_residual_with(&f, &grid, 3.0 + 2.0 + 1.0).unwrap();
        assert!(wrong > 0.1, "{wrong}");
        assert!(radial_ode_residual(&f, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn pure_power_profile_when_n_equals_l() {
        let f = eigenfunction(3, 4, 4, Sign::Plus).unwrap();
        let t = 0.9f64;
        assert!((f.phi(t) - (t / 2.0).cos().powi(5) * (t / 2.0).sin().powi(4)).abs() < 1e-15);
    }
}
