//! Exact comparison of the Sogge growth exponent with the Strichartz loss
//! exponent at the endpoint pairs that decide sharpness.

use crate::error::{LabError, Result};
use crate::strichartz::admissibility::{gamma_wave, Exponent};
use num_rational::Rational64;
use serde::Serialize;

/// `s(q) = (d-1)/2 - d/q` in rational arithmetic.
pub fn sogge_exponent_exact(d: u32, q: Exponent) -> Rational64 {
    let d = d as i64;
    Rational64::new(d - 1, 2) - Rational64::from_integer(d) * q.reciprocal()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessRow {
    pub p: String,
    pub q: String,
    /// `γ^W(p, q)`.
    pub gamma: Rational64,
    /// `s(q)`.
    pub growth: Rational64,
    pub gap: Rational64,
    pub epsilon: Option<Rational64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub d: u32,
    pub rows: Vec<SharpnessRow>,
    /// The loss exponent is attained by eigenfunctions, exactly or in the
    /// limit of the family.
    pub sharp: bool,
}

fn row(d: u32, p: Exponent, q: Exponent, epsilon: Option<Rational64>) -> SharpnessRow {
    let gamma = gamma_wave(p, q, d);
    let growth = sogge_exponent_exact(d, q);
    SharpnessRow { p: p.to_string(), q: q.to_string(), gamma, growth, gap: gamma - growth, epsilon }
}

/// `d >= 4`: the pair `(2, 2(d-1)/(d-3))` with both sides `(d+1)/(2(d-1))`.
/// `d = 2`: the pair `(4, ∞)`, with `(3/4, 1/2)`. `d = 3`: the family
/// `(2+ε, 2(2+ε)/ε)` at `ε ∈ {1/2, 1/10, 1/100}`, gap `ε/(2(2+ε)) → 0`.
pub fn sharpness_report(d: u32) -> Result<SharpnessReport> {
    let rows = match d {
        0 | 1 => return Err(LabError::InvalidParameter(format!("sphere dimension must be at least 2, got {d}"))),
        2 => vec![row(2, Exponent::int(4), Exponent::Infinite, None)],
        3 => [Rational64::new(1, 2), Rational64::new(1, 10), Rational64::new(1, 100)]
            .into_iter()
            .map(|e| {
                let two = Rational64::from_integer(2);
                row(3, Exponent::Finite(two + e), Exponent::Finite(two * (two + e) / e), Some(e))
            })
            .collect(),
        _ => {
            let d64 = d as i64;
            vec![row(d, Exponent::int(2), Exponent::ratio(2 * (d64 - 1), d64 - 3), None)]
        }
    };
    let sharp = match d {
        2 => false,
        3 => rows.windows(2).all(|w| w[1].gap < w[0].gap) && rows.iter().all(|r| {
            let e = r.epsilon.unwrap();
            r.gap == e / (Rational64::from_integer(2) * (Rational64::from_integer(2) + e))
        }),
        _ => rows[0].gap == Rational64::from_integer(0),
    };
    Ok(SharpnessReport { d, rows, sharp })
}
