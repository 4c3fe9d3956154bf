//! Numerical laboratory for the h-dependent WKB construction of the half wave
//! and half Klein-Gordon propagators on model Riemannian manifolds.
//!
//! The crate is organised bottom-up: [`geometry`] provides charts and the
//! regularized symbol, [`hamilton_jacobi`] the phase by characteristics,
//! [`wkb`] the transport amplitudes, [`oscillatory`] the kernel quadrature
//! and decay fits, [`strichartz`] the exponent algebra and spectral
//! propagators, and [`dirac`] the spinor eigenfunctions on spheres.

pub mod cutoff;
pub mod dirac;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod oscillatory;
pub mod quadrature;
pub mod strichartz;

pub use error::{LabError, Result};
pub use geometry::{ChartKind, MassParam, MetricChart, Symbol};
pub use linalg::{Matrix, Vector};
pub use cutoff::CutoffLibrary;
pub mod hamilton_jacobi;
#[cfg(test)]
mod invariants;
pub mod wkb;
