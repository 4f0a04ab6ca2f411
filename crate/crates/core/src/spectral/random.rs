use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::field::SpectralField;
use super::model::lambda_symbol;
use super::ops::leray_project;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Random divergence-free field with `|û_k| ∝ |k|^{-slope}`.
///
/// Coefficients are complex Gaussians drawn mode by mode in lattice order from a
/// ChaCha8 stream seeded with `seed`, projected onto `k^⊥` and scaled by the power law.
pub fn random_field<T: Scalar>(n: usize, seed: u64, slope: T) -> Result<SpectralField<T>> {
    if !slope.is_finite() {
        return Err(Error::invalid("slope", "must be finite"));
    }
    if n == 0 {
        return Err(Error::invalid("n", "truncation must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex::new(T::of(re), T::of(im))
    };
    let raw = SpectralField::from_fn(n, |k| {
        let a = lambda_symbol(k.norm_sq(), -slope);
        [draw() * a, draw() * a, draw() * a]
    });
    Ok(leray_project(&raw))
}
