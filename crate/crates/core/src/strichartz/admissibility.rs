//! Admissible exponent pairs and the Strichartz loss exponents, in exact
//! rational arithmetic.

use crate::error::{LabError, Result};
use num_rational::Rational64;
use num_traits::{One, Zero};
use std::fmt;

/// A Lebesgue exponent in `[1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational64),
    Infinite,
}

impl Exponent {
    pub fn int(n: i64) -> Self {
        Exponent::Finite(Rational64::from_integer(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Exponent::Finite(Rational64::new(n, d))
    }

    /// `1/p`, zero at infinity.
    pub fn reciprocal(&self) -> Rational64 {
        match self {
            Exponent::Finite(p) => p.recip(),
            Exponent::Infinite => Rational64::zero(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(p) => *p.numer() as f64 / *p.denom() as f64,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    fn equals(&self, n: i64) -> bool {
        *self == Exponent::int(n)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = LabError;

    /// Accepts `inf`, integers and `n/d`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinite);
        }
        let bad = || LabError::InvalidParameter(format!("cannot parse exponent {s:?}"));
        let r = match s.split_once('/') {
            Some((n, d)) => {
                let (n, d): (i64, i64) = (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?);
                if d == 0 {
                    return Err(bad());
                }
                Rational64::new(n, d)
            }
            None => Rational64::from_integer(s.parse().map_err(|_| bad())?),
        };
        Ok(Exponent::Finite(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Class {
    Wave,
    Schrodinger,
}

/// An exponent pair `(p, q)` in dimension `d` that passed [`classify`] for `class`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdmissiblePair {
    pub p: Exponent,
    pub q: Exponent,
    pub d: u32,
    pub class: Class,
}

impl AdmissiblePair {
    pub fn new(p: Exponent, q: Exponent, d: u32, class: Class) -> Result<Self> {
        check_class(p, q, d, class)?;
        Ok(AdmissiblePair { p, q, d, class })
    }
}

fn half() -> Rational64 {
    Rational64::new(1, 2)
}

fn check_range(p: Exponent, q: Exponent, d: u32) -> Result<()> {
    let two = Rational64::from_integer(2);
    for (name, e) in [("p", p), ("q", q)] {
        if let Exponent::Finite(v) = e {
            if v < two {
                return Err(LabError::InvalidParameter(format!("{name} = {v} is below 2")));
            }
        }
    }
    if d < 2 {
        return Err(LabError::InvalidParameter(format!("dimension {d} is below 2")));
    }
    Ok(())
}

/// Explains why `(p, q, d)` is not admissible for `class`.
fn check_class(p: Exponent, q: Exponent, d: u32, class: Class) -> Result<()> {
    check_range(p, q, d)?;
    let (ip, iq) = (p.reciprocal(), q.reciprocal());
    let dd = Rational64::from_integer(d as i64);
    let two = Rational64::from_integer(2);
    let (lhs, rhs, excluded, text, exclusion) = match class {
        Class::Wave => (
            two * ip + (dd - 1) * iq,
            (dd - 1) * half(),
            p.equals(2) && q.is_infinite() && d == 3,
            "2/p + (d-1)/q <= (d-1)/2",
            "(p, q, d) = (2, inf, 3)",
        ),
        Class::Schrodinger => (
            two * ip + dd * iq,
            dd * half(),
            p.equals(2) && q.is_infinite() && d == 2,
            "2/p + d/q <= d/2",
            "(p, q, d) = (2, inf, 2)",
        ),
    };
    if lhs > rhs {
        return Err(LabError::Inadmissible(format!("{class:?}: {text} fails ({lhs} > {rhs})")));
    }
    if excluded {
        return Err(LabError::Inadmissible(format!("{class:?}: endpoint {exclusion} is excluded")));
    }
    Ok(())
}

/// The admissibility classes `(p, q, d)` belongs to.
pub fn classify(p: Exponent, q: Exponent, d: u32) -> Result<Vec<Class>> {
    check_range(p, q, d)?;
    Ok([Class::Wave, Class::Schrodinger]
        .into_iter()
        .filter(|c| check_class(p, q, d, *c).is_ok())
        .collect())
}

/// `γ^W = d(1/2 - 1/q) - 1/p`.
pub fn gamma_wave(p: Exponent, q: Exponent, d: u32) -> Rational64 {
    Rational64::from_integer(d as i64) * (half() - q.reciprocal()) - p.reciprocal()
}

/// `γ^KG = (1 + d)(1/2 - 1/q) - 1/p`.
pub fn gamma_kg(p: Exponent, q: Exponent, d: u32) -> Rational64 {
    Rational64::from_integer(d as i64 + 1) * (half() - q.reciprocal()) - p.reciprocal()
}

/// `κ = δ(1/2 - 1/q) - 1/p` for a `TT*` kernel bound `h^{-δ}(1 + |t - s|/h)^{-τ}`.
pub fn tt_star_exponent(delta: Rational64, tau: Rational64, p: Exponent, q: Exponent) -> Result<Rational64> {
    let (ip, iq) = (p.reciprocal(), q.reciprocal());
    if ip > tau * (half() - iq) {
        return Err(LabError::Precondition(format!("1/p <= τ(1/2 - 1/q) fails: {ip} > {}", tau * (half() - iq))));
    }
    if p.equals(2) && q.is_infinite() && tau.is_one() {
        return Err(LabError::Precondition("(p, q, τ) = (2, inf, 1) is excluded".into()));
    }
    Ok(delta * (half() - iq) - ip)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExponentReport {
    pub gamma_w: Rational64,
    pub gamma_kg: Rational64,
    /// `γ^W` for the wave class, `γ^KG + 1/(2p)` for the Schrödinger class.
    pub predicted_loss: Rational64,
    /// [`tt_star_exponent`] with `(δ, τ) = (d, (d-1)/2)` for the wave class and
    /// `(d + 1, d/2)` for the Schrödinger class.
    pub kappa: Rational64,
}

impl ExponentReport {
    pub fn to_f64(r: Rational64) -> f64 {
        *r.numer() as f64 / *r.denom() as f64
    }
}

pub fn exponents(pair: &AdmissiblePair) -> Result<ExponentReport> {
    check_class(pair.p, pair.q, pair.d, pair.class)?;
    let (p, q, d) = (pair.p, pair.q, pair.d);
    let dd = Rational64::from_integer(d as i64);
    let gw = gamma_wave(p, q, d);
    let gk = gamma_kg(p, q, d);
    let (predicted_loss, kappa) = match pair.class {
        Class::Wave => (gw, tt_star_exponent(dd, (dd - 1) * half(), p, q)?),
        Class::Schrodinger => (gk + p.reciprocal() * half(), tt_star_exponent(dd + 1, dd * half(), p, q)?),
    };
    Ok(ExponentReport { gamma_w: gw, gamma_kg: gk, predicted_loss, kappa })
}

/// `(γ^W(2, 2(d-1)/(d-3)), (d+1)/(2(d-1)))` for `d >= 4`; the two agree.
pub fn endpoint_identity(d: u32) -> Result<(Rational64, Rational64)> {
    if d < 4 {
        return Err(LabError::InvalidParameter(format!("endpoint identity needs d >= 4, got {d}")));
    }
    let d = d as i64;
    let q = Exponent::ratio(2 * (d - 1), d - 3);
    Ok((gamma_wave(Exponent::int(2), q, d as u32), Rational64::new(d + 1, 2 * (d - 1))))
}
