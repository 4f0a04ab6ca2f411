//! Spectral representation of zero-mean periodic vector fields on the 3-torus and the
//! diagonal operators acting on them.

pub mod fft;
mod field;
mod lattice;
mod model;
mod ops;
mod random;
mod transform;

pub use field::SpectralField;
pub use lattice::{Lattice, Slot, WaveIndex};
pub use model::{lambda_symbol, smoothing_symbol, ModelContext, ModelParams};
pub use ops::{
    fractional_laplacian, gradient, leray_project, lp_norm, lp_norm_of_grid, quadrature_grid, smoothing_constant,
    smoothing_g, sobolev_norm, sobolev_norm_sq,
};
pub use random::random_field;
pub use transform::{to_physical, to_physical_complex, to_spectral, PhysicalField};
