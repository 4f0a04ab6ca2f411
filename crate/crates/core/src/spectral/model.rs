use std::sync::Arc;

use super::fft::{fft_friendly_size, Fft3};
use super::lattice::{Lattice, WaveIndex};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Physical parameters of the regularized model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams<T> {
    /// Viscosity ν > 0.
    pub nu: T,
    /// Filter length scale α > 0.
    pub alpha: T,
    /// Filter order θ₁ ≥ 0.
    pub theta1: T,
    /// Dissipation order θ₂ > 0.
    pub theta2: T,
}

impl<T: Scalar> ModelParams<T> {
    pub fn validate(&self) -> Result<()> {
        let finite = |name, x: T| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, "must be finite"))
            }
        };
        finite("nu", self.nu)?;
        finite("alpha", self.alpha)?;
        finite("theta1", self.theta1)?;
        finite("theta2", self.theta2)?;
        if self.nu <= T::zero() {
            return Err(Error::invalid("nu", "must be > 0"));
        }
        if self.alpha <= T::zero() {
            return Err(Error::invalid("alpha", "must be > 0"));
        }
        if self.theta1 < T::zero() {
            return Err(Error::invalid("theta1", "must be >= 0"));
        }
        if self.theta2 <= T::zero() {
            return Err(Error::invalid("theta2", "must be > 0"));
        }
        Ok(())
    }
}

/// `|k|^s` evaluated from the exact integer `|k|²`.
#[inline]
pub fn lambda_symbol<T: Scalar>(norm_sq: i64, s: T) -> T {
    if s == T::zero() {
        return T::one();
    }
    T::of(norm_sq as f64).powf(s / T::of(2.0))
}

/// `1 / (1 + α^{2θ₁} |k|^{2θ₁})`.
#[inline]
pub fn smoothing_symbol<T: Scalar>(norm_sq: i64, alpha: T, theta1: T) -> T {
    let a2k2 = alpha * alpha * T::of(norm_sq as f64);
    T::one() / (T::one() + a2k2.powf(theta1))
}

/// Parameters plus everything precomputed for one truncation: the dissipation symbol
/// `|k|^{2θ₂}`, the filter symbol of `G`, and the padded grid used for products.
///
/// Cloning is cheap; the heavy parts are shared.
#[derive(Clone, Debug)]
pub struct ModelContext<T: Scalar> {
    params: ModelParams<T>,
    lattice: Arc<Lattice>,
    dissipation: Arc<Vec<T>>,
    smoothing: Arc<Vec<T>>,
    product_grid: Arc<Fft3<T>>,
}

impl<T: Scalar> ModelContext<T> {
    pub fn new(params: ModelParams<T>, n: usize) -> Result<Self> {
        params.validate()?;
        if n == 0 {
            return Err(Error::invalid("n", "truncation must be >= 1"));
        }
        let lattice = Lattice::shared(n);
        let dissipation = lattice
            .norm_sq()
            .iter()
            .map(|&q| lambda_symbol(q, params.theta2 + params.theta2))
            .collect();
        let smoothing = lattice
            .norm_sq()
            .iter()
            .map(|&q| smoothing_symbol(q, params.alpha, params.theta1))
            .collect();
        // Quadratic products of modes |k_i| <= n reach |k_i| <= 2n; a grid of at least
        // 3n+1 points keeps every alias outside the retained band (the 2/3 rule).
        let m = fft_friendly_size((3 * n + 1).max(2 * n + 2));
        Ok(ModelContext {
            params,
            lattice,
            dissipation: Arc::new(dissipation),
            smoothing: Arc::new(smoothing),
            product_grid: Arc::new(Fft3::new(m)),
        })
    }

    pub fn with_params(nu: T, alpha: T, theta1: T, theta2: T, n: usize) -> Result<Self> {
        Self::new(
            ModelParams {
                nu,
                alpha,
                theta1,
                theta2,
            },
            n,
        )
    }

    #[inline]
    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    #[inline]
    pub fn nu(&self) -> T {
        self.params.nu
    }

    #[inline]
    pub fn alpha(&self) -> T {
        self.params.alpha
    }

    #[inline]
    pub fn theta1(&self) -> T {
        self.params.theta1
    }

    #[inline]
    pub fn theta2(&self) -> T {
        self.params.theta2
    }

    #[inline]
    pub fn truncation(&self) -> usize {
        self.lattice.truncation()
    }

    #[inline]
    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    /// `|k|^{2θ₂}` per stored mode.
    #[inline]
    pub fn dissipation_symbol(&self) -> &[T] {
        &self.dissipation
    }

    /// `(1 + α^{2θ₁}|k|^{2θ₁})^{-1}` per stored mode.
    #[inline]
    pub fn smoothing_symbol(&self) -> &[T] {
        &self.smoothing
    }

    pub fn multiplier_g(&self, k: WaveIndex) -> T {
        smoothing_symbol(k.norm_sq(), self.params.alpha, self.params.theta1)
    }

    pub fn multiplier_lambda(&self, k: WaveIndex, s: T) -> T {
        lambda_symbol(k.norm_sq(), s)
    }

    #[inline]
    pub fn product_grid(&self) -> &Fft3<T> {
        &self.product_grid
    }

    /// 2/3-rule mask on the product grid: `3|k_i| < m` for every component.
    pub fn dealias_mask(&self, k: WaveIndex) -> bool {
        3 * k.sup_norm() < self.product_grid.size()
    }
}
