//! Pseudo-spectral simulation of the stochastic 3D Leray-α model with fractional
//! dissipation on the periodic torus `T³ = [0, 2π)³`:
//!
//! ```text
//! du + νΛ^{2θ₂}u dt + B(Gu, u) dt = g(u) dW,    G = (I + α^{2θ₁}Λ^{2θ₁})^{-1}
//! ```
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the `*64`/`*32`
//! aliases below fix the precision.

pub mod cli_io;
pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod noise;
pub mod nonlinear;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result, SnapshotError};
pub use scalar::Scalar;
pub use spectral::{ModelContext, ModelParams, PhysicalField, SpectralField, WaveIndex};

pub type SpectralField64 = SpectralField<f64>;
pub type SpectralField32 = SpectralField<f32>;
pub type ModelContext64 = ModelContext<f64>;
pub type ModelContext32 = ModelContext<f32>;
