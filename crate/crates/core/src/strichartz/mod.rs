//! Strichartz exponent algebra, Littlewood-Paley shells and spectral
//! propagators with mixed-norm loss regression.

pub mod admissibility;
pub mod loss;
pub mod norms;
pub mod partition;
pub mod propagate;

pub use admissibility::{classify, exponents, tt_star_exponent, AdmissiblePair, Class, Exponent, ExponentReport};
pub use loss::{loss_exponent_fit, torus_loss_sweep, LossReport};
pub use norms::mixed_norm;
pub use partition::{build_partition, DyadicPartition};
pub use propagate::{spectral_propagate, Model, SpectralData, TorusData, ZonalData};
