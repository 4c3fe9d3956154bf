//! Randomized invariants across modules.

use crate::cutoff::CutoffLibrary;
use crate::dirac::{eigenfunction, gamma_matrices, jacobi, lq_radial_norm, Sign};
use crate::dirac::sharpness::sogge_exponent_exact;
use crate::hamilton_jacobi::{phase_eval, PhaseField};
use crate::oscillatory::decay::{decay_fit, DecaySample};
use crate::strichartz::admissibility::{endpoint_identity, gamma_kg, gamma_wave, Exponent};
use crate::strichartz::partition::DyadicPartition;
use crate::{MassParam, MetricChart, Symbol, Vector};
use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        (1i64..40, 1i64..12).prop_filter_map("p >= 1", |(n, d)| (n >= d).then(|| Exponent::ratio(n, d))),
        Just(Exponent::Infinite),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_matrices_anticommute(d in 2usize..=8) {
        let g = gamma_matrices(d).unwrap();
        prop_assert!(g.anticommutation_holds());
        prop_assert_eq!(g.matrices.len(), d);
    }

    #[test]
    fn jacobi_reflection(n in 0usize..40, a in 0.0f64..4.0, b in 0.0f64..4.0, x in -1.0f64..1.0) {
        let lhs = jacobi::jacobi_value(n, a, b, -x);
        let rhs = if n % 2 == 0 { 1.0 } else { -1.0 } * jacobi::jacobi_value(n, b, a, x);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn eigenfunctions_have_unit_mass(d in 2usize..=5, n in 0usize..20, dl in 0usize..20, plus in any::<bool>()) {
        let l = dl.min(n);
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let f = eigenfunction(d, n, l, sign).unwrap();
        let mass = lq_radial_norm(&f, Exponent::int(2)).unwrap();
        prop_assert!((mass - 1.0).abs() < 1e-10, "mass {mass}");
    }

    #[test]
    fn kg_exponent_exceeds_wave_by_the_space_gap(p in exponent(), q in exponent(), d in 1u32..8) {
        let gap = gamma_kg(p, q, d) - gamma_wave(p, q, d);
        prop_assert_eq!(gap, Rational64::new(1, 2) - q.reciprocal());
    }

    #[test]
    fn endpoint_loss_equals_sogge_growth(d in 4u32..40) {
        let (gamma, closed) = endpoint_identity(d).unwrap();
        prop_assert_eq!(gamma, closed);
        let q = Exponent::ratio(2 * (d as i64 - 1), d as i64 - 3);
        prop_assert_eq!(sogge_exponent_exact(d, q), closed);
    }

    #[test]
    fn partition_sums_to_one(k_max in 1u32..8, s in 0.0f64..1.0) {
        let part = DyadicPartition { k_max };
        let lambda = s * 4f64.powi(k_max as i32) / 2.0;
        prop_assert!((part.partial_sum(k_max, lambda) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decay_fit_recovers_planted_exponents(
        alpha in 0.5f64..3.0,
        beta in 0.0f64..1.5,
        c in -2.0f64..2.0,
    ) {
        let mut samples = Vec::new();
        for h in [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0] {
            for j in 0..5 {
                let t: f64 = 4.0 * h * (1.0f64 / (4.0 * h)).powf(j as f64 / 4.0);
                let v = (c - alpha * h.ln() - beta * (1.0 + t / h).ln()).exp();
                samples.push(DecaySample { h, t, x: vec![0.0, 0.0], y: vec![0.0, 0.0], value: Complex64::new(v, 0.0), max_abs: v });
            }
        }
        let fit = decay_fit(&samples).unwrap();
        prop_assert!((fit.alpha - alpha).abs() < 1e-8 && (fit.beta - beta).abs() < 1e-8);
        prop_assert!(fit.reliable && fit.residual < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flat_phase_matches_closed_form(
        t in -1.0f64..1.0,
        x in (-2.0f64..2.0, -2.0f64..2.0),
        xi in (-2.0f64..2.0, -2.0f64..2.0),
        m in 0.0f64..2.0,
        h in 0.05f64..1.0,
    ) {
        let xi = Vector::<2>::new(xi.0, xi.1);
        prop_assume!(xi.norm() > 0.1);
        let x = Vector::<2>::new(x.0, x.1);
        let mass = MassParam::new(m).unwrap();
        let symbol = Symbol::new(MetricChart::flat(), mass, CutoffLibrary::standard(mass), h).unwrap();
        let field = PhaseField::new(symbol.clone(), 1.0);
        let v = phase_eval(&field, t, &x, &xi).unwrap();
        let exact = x.dot(&xi) + t * (symbol.mass_term() + xi.norm_squared()).sqrt();
        prop_assert!((v.s - exact).abs() < 1e-8 * (1.0 + exact.abs()), "{} vs {exact}", v.s);
    }
}
