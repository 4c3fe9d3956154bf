//! Fixtures shared by the benchmarks.

use wkb_lab::cutoff::CutoffLibrary;
use wkb_lab::hamilton_jacobi::{FlowOptions, PhaseField};
use wkb_lab::{MassParam, MetricChart, Symbol};

/// Phase field on the default perturbed chart with the decay-experiment cutoffs.
pub fn perturbed_field(m: f64, h: f64) -> PhaseField<2> {
    let mass = MassParam::new(m).expect("valid mass");
    let sym = Symbol::new(MetricChart::perturbed_default(), mass, CutoffLibrary::dispersion(mass), h).expect("valid symbol");
    PhaseField::new(sym, 1.0).with_options(FlowOptions::sweep())
}

pub fn flat_field(m: f64, h: f64) -> PhaseField<2> {
    let mass = MassParam::new(m).expect("valid mass");
    let sym = Symbol::new(MetricChart::flat(), mass, CutoffLibrary::dispersion(mass), h).expect("valid symbol");
    PhaseField::new(sym, 1.0)
}
