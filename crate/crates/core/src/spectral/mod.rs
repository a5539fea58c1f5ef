//! Periodic-box spectral representation: grids, FFTs, fields, Fourier
//! multipliers, norms and quadrature.

mod fft;
mod field;
mod grid;
pub mod norm;
pub mod ops;
pub mod quadrature;
pub mod snapshot;

pub use fft::Fft3;
pub use field::{resample_coeffs, ScalarField, SpectralField, TensorField, VectorField};
pub use grid::Grid;
pub use norm::{l2_norm, linf_norm, norm, Exponent, Region};
pub use quadrature::{Convolver, Stencil};
pub use ops::{gradient, heat_propagate, leray_project, riesz_tensor};
