//! Diagonal operator calculus: Leray projection, `Λ^s`, the filter `G`, and norms.

use num_complex::Complex;

use super::field::SpectralField;
use super::model::{lambda_symbol, smoothing_symbol, ModelContext};
use super::transform::to_physical;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `P_σ`: removes the component of each `û_k` along `k`.
pub fn leray_project<T: Scalar>(u: &SpectralField<T>) -> SpectralField<T> {
    let mut out = u.clone();
    let lattice = u.lattice().clone();
    for (i, (k, &q)) in lattice.modes().iter().zip(lattice.norm_sq()).enumerate() {
        let kk = k.components().map(|c| T::of(c as f64));
        let v = u.at(i);
        let dot = v[0] * kk[0] + v[1] * kk[1] + v[2] * kk[2];
        let f = dot / T::of(q as f64);
        out.set_at(i, [v[0] - f * kk[0], v[1] - f * kk[1], v[2] - f * kk[2]]);
    }
    out
}

/// `Λ^s û_k = |k|^s û_k`. Any real `s` is allowed since `k = 0` is never stored.
pub fn fractional_laplacian<T: Scalar>(u: &SpectralField<T>, s: T) -> SpectralField<T> {
    let q = u.lattice().norm_sq();
    u.apply_symbol(|i| lambda_symbol(q[i], s))
}

/// `G = (I + α^{2θ₁}Λ^{2θ₁})^{-1}`.
pub fn smoothing_g<T: Scalar>(u: &SpectralField<T>, ctx: &ModelContext<T>) -> SpectralField<T> {
    if u.truncation() == ctx.truncation() {
        let g = ctx.smoothing_symbol();
        u.apply_symbol(|i| g[i])
    } else {
        let q = u.lattice().norm_sq();
        u.apply_symbol(|i| smoothing_symbol(q[i], ctx.alpha(), ctx.theta1()))
    }
}

/// `sup_k |k|^β / (1 + α^{2θ₁}|k|^{2θ₁})` over the truncation: the constant with
/// `‖Gu‖_{s+β} ≤ C‖u‖_s` on this lattice.
pub fn smoothing_constant<T: Scalar>(ctx: &ModelContext<T>, beta: T) -> T {
    ctx.lattice()
        .norm_sq()
        .iter()
        .zip(ctx.smoothing_symbol())
        .map(|(&q, &g)| lambda_symbol(q, beta) * g)
        .fold(T::zero(), T::max)
}

/// `‖u‖_s² = Σ_{k∈Z³₀} |k|^{2s}|û_k|²`.
pub fn sobolev_norm_sq<T: Scalar>(u: &SpectralField<T>, s: T) -> T {
    let q = u.lattice().norm_sq();
    let two_s = s + s;
    u.weighted_energy(|i| lambda_symbol(q[i], two_s))
}

pub fn sobolev_norm<T: Scalar>(u: &SpectralField<T>, s: T) -> T {
    sobolev_norm_sq(u, s).sqrt()
}

/// Quadrature grid used for `L^p` diagnostics: `(2n+2)³`.
pub fn quadrature_grid(n: usize) -> usize {
    2 * n + 2
}

/// `L^p` norm with respect to the normalized measure `dx/(2π)³`, so that
/// `lp_norm(u, 2) == sobolev_norm(u, 0)`. Pass `T::infinity()` for the sup norm.
///
/// Uniform collocation on the `(2n+2)³` grid: exact for `p = 2`, a quadrature
/// approximation otherwise.
pub fn lp_norm<T: Scalar>(u: &SpectralField<T>, p: T) -> Result<T> {
    let m = quadrature_grid(u.truncation());
    let grid = to_physical(u, m)?;
    lp_norm_of_grid(grid.components(), p)
}

/// `L^p` norm of grid samples of a vector field (pointwise Euclidean magnitude).
pub fn lp_norm_of_grid<T: Scalar>(comps: &[Vec<T>], p: T) -> Result<T> {
    if p.is_nan() || p < T::one() {
        return Err(Error::invalid("p", "must be >= 1 or infinity"));
    }
    let points = comps.first().map_or(0, Vec::len);
    if points == 0 {
        return Ok(T::zero());
    }
    let mag = |j: usize| comps.iter().map(|c| c[j] * c[j]).fold(T::zero(), |a, b| a + b).sqrt();
    if p.is_infinite() {
        return Ok((0..points).map(mag).fold(T::zero(), T::max));
    }
    let sum = (0..points).map(|j| mag(j).powf(p)).fold(T::zero(), |a, b| a + b);
    Ok((sum / T::of(points as f64)).powf(T::one() / p))
}

/// Spectral gradient `∂_m v_i`, returned as `[m][i]`.
pub fn gradient<T: Scalar>(v: &SpectralField<T>) -> [[Vec<Complex<T>>; 3]; 3] {
    let modes = v.lattice().modes();
    let comps = v.components();
    [0, 1, 2].map(|m| {
        [0, 1, 2].map(|i| {
            comps[i]
                .iter()
                .zip(modes)
                .map(|(z, k)| {
                    let km = T::of(k.components()[m] as f64);
                    // i·k_m·z
                    Complex::new(-km * z.im, km * z.re)
                })
                .collect()
        })
    })
}
