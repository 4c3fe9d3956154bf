//! Kernel quadrature, stationary-phase references and decay fits.

pub mod decay;
pub mod hessian;
pub mod kernel;
pub mod stationary_phase;
pub mod van_der_corput;

pub use decay::{decay_fit, DecayFit, DecaySample};
pub use hessian::{hessian_spectrum, reduced_phase_second_derivative};
pub use kernel::{kernel_eval, prepare_slice, KernelOptions, KernelRequest, KernelSlice, Route, Window};
