//! Smooth compactly supported cutoffs.
//!
//! Everything is built from the bump `exp(-1/(1-s^2))` and the smooth step
//! `e(s)/(e(s)+e(1-s))` with `e(s) = exp(-1/s)`. Both are pushed through
//! [`Jet`] so the symbol code gets exact derivatives up to order four.

use crate::error::{LabError, Result};
use crate::geometry::MassParam;
use crate::jet::Jet;

/// Below this argument `exp(-1/s)` underflows to zero in double precision.
const FLAT_EDGE: f64 = 1.0 / 700.0;

fn edge_exp(s: Jet) -> Jet {
    if s.value() <= FLAT_EDGE {
        Jet::constant(0.0)
    } else {
        (-s.recip()).exp()
    }
}

/// `exp(-1/(1-s^2))` on `|s| < 1`, zero outside.
pub fn bump(s: f64) -> f64 {
    bump_jet(Jet::constant(s)).value()
}

pub fn bump_jet(s: Jet) -> Jet {
    let gap = -(s * s) + 1.0;
    edge_exp(gap)
}

/// `exp(1 - 1/(1 - s))` on `s < 1`, zero for `s >= 1`; equals 1 at `s = 0`.
/// Used as a radial profile in `s = |x - x0|^2 / r^2`.
pub fn unit_radial_bump_jet(s: Jet) -> Jet {
    let gap = -s + 1.0;
    if gap.value() <= FLAT_EDGE {
        return Jet::constant(0.0);
    }
    (-gap.recip() + 1.0).exp()
}

/// Smooth step: 0 for `s <= 0`, 1 for `s >= 1`, strictly increasing between.
pub fn smooth_step(s: f64) -> f64 {
    smooth_step_jet(Jet::constant(s)).value()
}

pub fn smooth_step_jet(s: Jet) -> Jet {
    let v = s.value();
    if v <= FLAT_EDGE {
        return Jet::constant(0.0);
    }
    if v >= 1.0 - FLAT_EDGE {
        return Jet::constant(1.0);
    }
    let left = edge_exp(s);
    let right = edge_exp(-s + 1.0);
    left / (left + right)
}

/// Bump supported on the open interval `(a, b)` of λ-values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusBump {
    pub a: f64,
    pub b: f64,
}

impl AnnulusBump {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && 0.0 < a && a < b) {
            return Err(LabError::InvalidParameter(format!(
                "annulus needs 0 < a < b, got [{a}, {b}]"
            )));
        }
        Ok(AnnulusBump { a, b })
    }

    fn scaled(&self, lambda: Jet) -> Jet {
        (lambda * 2.0 - (self.a + self.b)) * (1.0 / (self.b - self.a))
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        if lambda <= self.a || lambda >= self.b {
            return 0.0;
        }
        bump_jet(self.scaled(Jet::constant(lambda))).value()
    }

    pub fn jet(&self, lambda: Jet) -> Jet {
        bump_jet(self.scaled(lambda))
    }

    pub fn contains(&self, lambda: f64) -> bool {
        lambda > self.a && lambda < self.b
    }
}

/// Equal to 1 on `[rise_end, fall_start]`, 0 outside `(rise_start, fall_end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub rise_start: f64,
    pub rise_end: f64,
    pub fall_start: f64,
    pub fall_end: f64,
}

impl Plateau {
    pub fn new(rise_start: f64, rise_end: f64, fall_start: f64, fall_end: f64) -> Result<Self> {
        if !(rise_start < rise_end && rise_end <= fall_start && fall_start < fall_end) {
            return Err(LabError::InvalidParameter(format!(
                "plateau breakpoints must increase: {rise_start}, {rise_end}, {fall_start}, {fall_end}"
            )));
        }
        Ok(Plateau { rise_start, rise_end, fall_start, fall_end })
    }

    pub fn is_one(&self, lambda: f64) -> bool {
        lambda >= self.rise_end && lambda <= self.fall_start
    }

    pub fn jet(&self, lambda: Jet) -> Jet {
        let l = lambda.value();
        if self.is_one(l) {
            return Jet::constant(1.0);
        }
        if l <= self.rise_start || l >= self.fall_end {
            return Jet::constant(0.0);
        }
        let rise = smooth_step_jet((lambda - self.rise_start) * (1.0 / (self.rise_end - self.rise_start)));
        let fall = smooth_step_jet((-lambda + self.fall_end) * (1.0 / (self.fall_end - self.fall_start)));
        rise * fall
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        self.jet(Jet::constant(lambda)).value()
    }
}

/// Low-pass cutoff: 1 on `λ <= one_below`, 0 on `λ >= zero_above`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowPass {
    pub one_below: f64,
    pub zero_above: f64,
}

impl LowPass {
    pub fn eval(&self, lambda: f64) -> f64 {
        1.0 - smooth_step((lambda - self.one_below) / (self.zero_above - self.one_below))
    }
}

/// The cutoffs used by one experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffLibrary {
    pub phi: AnnulusBump,
    pub phi_tilde_lp: LowPass,
    pub psi_tilde: Plateau,
}

impl CutoffLibrary {
    /// `phi` supported in `[a, b]`; `psi_tilde` equals 1 on `[a/2, 2b + 2 m̃²]`.
    pub fn new(a: f64, b: f64, mass: MassParam) -> Result<Self> {
        let phi = AnnulusBump::new(a, b)?;
        let top = 2.0 * b + 2.0 * mass.m_tilde.max(1.0).powi(2);
        let psi_tilde = Plateau::new(a / 4.0, a / 2.0, top, 2.0 * top)?;
        let phi_tilde_lp = LowPass { one_below: 1.0, zero_above: 2.0 };
        Ok(CutoffLibrary { phi, phi_tilde_lp, psi_tilde })
    }

    /// `supp phi ⊂ [1/4, 4]`, i.e. `1/2 <= |ξ| <= 2`.
    pub fn standard(mass: MassParam) -> Self {
        Self::new(0.25, 4.0, mass).expect("static annulus")
    }

    /// `supp phi ⊂ [9, 36]`, i.e. `3 <= |ξ| <= 6`, used by the decay experiments.
    pub fn dispersion(mass: MassParam) -> Self {
        Self::new(9.0, 36.0, mass).expect("static annulus")
    }

    /// Klein-Gordon hypothesis: phi vanishes on `[-2m̃², 2m̃²]`.
    pub fn separated_from_mass(&self, mass: MassParam) -> bool {
        self.phi.a >= 2.0 * mass.m_tilde * mass.m_tilde
    }

    /// `psi(λ) = psi_tilde(λ) λ^{1/2}` with derivatives up to order four.
    pub fn psi_jet(&self, lambda: f64) -> Jet {
        if lambda <= self.psi_tilde.rise_start {
            return Jet::constant(0.0);
        }
        let l = Jet::variable(lambda);
        if self.psi_tilde.is_one(lambda) {
            return l.sqrt();
        }
        self.psi_tilde.jet(l) * l.sqrt()
    }

    pub fn psi(&self, lambda: f64) -> f64 {
        if lambda <= self.psi_tilde.rise_start {
            return 0.0;
        }
        if self.psi_tilde.is_one(lambda) {
            return lambda.sqrt();
        }
        self.psi_tilde.eval(lambda) * lambda.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_support_and_peak() {
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-1.2), 0.0);
        assert!((bump(0.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn smooth_step_limits_and_symmetry() {
        assert_eq!(smooth_step(-0.5), 0.0);
        assert_eq!(smooth_step(1.5), 1.0);
        for &s in &[0.1, 0.3, 0.5, 0.77] {
            assert!((smooth_step(s) + smooth_step(1.0 - s) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn psi_is_sqrt_on_plateau_and_zero_below() {
        let lib = CutoffLibrary::standard(MassParam::new(1.0).unwrap());
        for &l in &[0.125, 0.5, 2.0, 10.0] {
            assert_eq!(lib.psi(l), l.sqrt());
        }
        assert_eq!(lib.psi(0.01), 0.0);
        assert_eq!(lib.psi(-3.0), 0.0);
        assert_eq!(lib.psi(1e6), 0.0);
    }

    #[test]
    fn psi_jet_matches_finite_differences_in_transition() {
        let lib = CutoffLibrary::standard(MassParam::new(1.0).unwrap());
        let l = 0.09;
        let e = 1e-6;
        let j = lib.psi_jet(l);
        let fd = (lib.psi(l + e) - lib.psi(l - e)) / (2.0 * e);
        assert!((j.derivative(1) - fd).abs() < 1e-5 * (1.0 + fd.abs()));
    }
}
