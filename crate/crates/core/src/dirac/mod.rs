//! The Dirac operator on round spheres: gamma matrices, spinor eigenfunctions
//! from Jacobi polynomials, their `L^q` growth and the sharpness comparison.

pub mod eigen;
pub mod gamma;
pub mod growth;
pub mod jacobi;
pub mod sharpness;

pub use eigen::{eigenfunction, radial_ode_residual, Sign, SpinorEigenfunction};
pub use gamma::{gamma_matrices, GammaSet};
pub use growth::{jacobi_moment_fit, lq_radial_norm, sogge_fit, MomentFit, SoggeFit};
pub use jacobi::jacobi;
pub use sharpness::{sharpness_report, SharpnessReport};
