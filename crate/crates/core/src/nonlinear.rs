//! Convective nonlinearity `B(u, v) = P_σ((u·∇)v)`, the trilinear form, and commutators
//! `[Λ^s, f]g`, all evaluated pseudo-spectrally on alias-free padded grids.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::fft::{fft_friendly_size, Fft3};
use crate::spectral::{
    fractional_laplacian, gradient, leray_project, lp_norm, lp_norm_of_grid, quadrature_grid, smoothing_g,
    sobolev_norm, Lattice, ModelContext, SpectralField,
};

fn check_truncations<T: Scalar>(ctx: &ModelContext<T>, fields: &[&SpectralField<T>]) -> Result<()> {
    for f in fields {
        if f.truncation() != ctx.truncation() {
            return Err(Error::TruncationMismatch {
                left: ctx.truncation(),
                right: f.truncation(),
            });
        }
    }
    Ok(())
}

/// `(u·∇)v = Σ_m u_m ∂_m v` on `fft`'s grid, analyzed onto `out` (no projection).
fn advect_on<T: Scalar>(fft: &Fft3<T>, u: &SpectralField<T>, v: &SpectralField<T>, out: &Lattice) -> [Vec<Complex<T>>; 3] {
    let lattice = u.lattice();
    let grad = gradient(v);
    let uc = u.components();
    let mut spectra: Vec<&[Complex<T>]> = vec![&uc[0], &uc[1], &uc[2]];
    for row in &grad {
        for c in row {
            spectra.push(c);
        }
    }
    let grid = fft.synthesize(lattice, &spectra);
    let (um, dv) = grid.split_at(3);
    let points = fft.points();
    let prod: Vec<Vec<T>> = (0..3)
        .map(|i| {
            (0..points)
                .map(|j| um[0][j] * dv[i][j] + um[1][j] * dv[3 + i][j] + um[2][j] * dv[6 + i][j])
                .collect()
        })
        .collect();
    let mut coeffs = fft.analyze(out, &[&prod[0], &prod[1], &prod[2]]).into_iter();
    [coeffs.next().unwrap(), coeffs.next().unwrap(), coeffs.next().unwrap()]
}

/// Unprojected advection `(u·∇)v` truncated to the cube `|k_i| ≤ n`.
pub fn advection<T: Scalar>(u: &SpectralField<T>, v: &SpectralField<T>, ctx: &ModelContext<T>) -> Result<SpectralField<T>> {
    check_truncations(ctx, &[u, v])?;
    let comps = advect_on(ctx.product_grid(), u, v, ctx.lattice());
    SpectralField::from_components(ctx.lattice().clone(), comps)
}

/// `B(u, v) = P_σ((u·∇)v)` restricted to the Galerkin cube.
pub fn bilinear_b<T: Scalar>(u: &SpectralField<T>, v: &SpectralField<T>, ctx: &ModelContext<T>) -> Result<SpectralField<T>> {
    Ok(leray_project(&advection(u, v, ctx)?))
}

/// The Leray-α nonlinearity `B(u) := B(Gu, u)`.
pub fn leray_nonlinearity<T: Scalar>(u: &SpectralField<T>, ctx: &ModelContext<T>) -> Result<SpectralField<T>> {
    bilinear_b(&smoothing_g(u, ctx), u, ctx)
}

/// `⟨B(u, v), w⟩`.
pub fn trilinear<T: Scalar>(u: &SpectralField<T>, v: &SpectralField<T>, w: &SpectralField<T>, ctx: &ModelContext<T>) -> Result<T> {
    check_truncations(ctx, &[w])?;
    bilinear_b(u, v, ctx)?.inner(w)
}

fn doubled_grid<T: Scalar>(n: usize) -> (Fft3<T>, std::sync::Arc<Lattice>) {
    // products of modes |k_i| <= n are resolved exactly on the doubled cube when m > 4n
    (Fft3::new(fft_friendly_size(4 * n + 1)), Lattice::shared(2 * n))
}

fn pointwise_products<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(&p, &q)| p * q).collect())
        .collect()
}

/// `[Λ^s, f]g = Λ^s(fg) − fΛ^s g` with component-wise products `(fg)_i = f_i g_i`.
///
/// Products of fields on the cube `|k_i| ≤ n` live on `|k_i| ≤ 2n`, so the result is
/// returned exactly at truncation `2n`. Its spatial mean (the `k = 0` coefficient)
/// is not representable and is dropped.
pub fn commutator<T: Scalar>(s: T, f: &SpectralField<T>, g: &SpectralField<T>) -> Result<SpectralField<T>> {
    f.ensure_same_truncation(g)?;
    if s.is_nan() || s < T::zero() {
        return Err(Error::invalid("s", "must be >= 0"));
    }
    let n = f.truncation();
    let (fft, wide) = doubled_grid::<T>(n);
    let ls_g = fractional_laplacian(g, s);
    let (fc, gc, lc) = (f.components(), g.components(), ls_g.components());
    let grid = fft.synthesize(f.lattice(), &[&fc[0], &fc[1], &fc[2], &gc[0], &gc[1], &gc[2], &lc[0], &lc[1], &lc[2]]);
    let fg = pointwise_products(&grid[0..3], &grid[3..6]);
    let f_lg = pointwise_products(&grid[0..3], &grid[6..9]);
    let mut c = fft.analyze(&wide, &[&fg[0], &fg[1], &fg[2], &f_lg[0], &f_lg[1], &f_lg[2]]).into_iter();
    let fg_hat = SpectralField::from_components(wide.clone(), [c.next().unwrap(), c.next().unwrap(), c.next().unwrap()])?;
    let f_lg_hat = SpectralField::from_components(wide, [c.next().unwrap(), c.next().unwrap(), c.next().unwrap()])?;
    fractional_laplacian(&fg_hat, s).sub(&f_lg_hat)
}

/// `Λ^s((a·∇)u) − (a·∇)Λ^s u`, exact at truncation `2n` (zero-mean for divergence-free `a`).
pub fn advective_commutator<T: Scalar>(s: T, a: &SpectralField<T>, u: &SpectralField<T>) -> Result<SpectralField<T>> {
    a.ensure_same_truncation(u)?;
    if s.is_nan() || s < T::zero() {
        return Err(Error::invalid("s", "must be >= 0"));
    }
    let (fft, wide) = doubled_grid::<T>(u.truncation());
    let first = SpectralField::from_components(wide.clone(), advect_on(&fft, a, u, &wide))?;
    let second = SpectralField::from_components(wide.clone(), advect_on(&fft, a, &fractional_laplacian(u, s), &wide))?;
    fractional_laplacian(&first, s).sub(&second)
}

/// Ratio `‖u‖_{L⁶} / ‖Λu‖_{L²}` (Sobolev embedding `H¹ ⊂ L⁶`).
pub fn embedding_ratio<T: Scalar>(u: &SpectralField<T>) -> Result<T> {
    Ok(lp_norm(u, T::of(6.0))? / sobolev_norm(u, T::one()))
}

/// Commutator-estimate ratio for the Leray nonlinearity at `s = 1`:
///
/// `‖[Λ, Gu·]∇u‖_{L^{3/2}} / (‖∇Gu‖_{L⁶}‖Λu‖_{L²} + ‖ΛGu‖_{L⁶}‖∇u‖_{L²})`.
pub fn commutator_ratio<T: Scalar>(u: &SpectralField<T>, ctx: &ModelContext<T>) -> Result<T> {
    check_truncations(ctx, &[u])?;
    let gu = smoothing_g(u, ctx);
    let comm = advective_commutator(T::one(), &gu, u)?;
    let lhs = lp_norm(&comm, T::of(1.5))?;

    let fft = Fft3::new(quadrature_grid(u.truncation()));
    let grad = gradient(&gu);
    let spectra: Vec<&[Complex<T>]> = grad.iter().flat_map(|row| row.iter().map(|c| c.as_slice())).collect();
    let grad_grid = fft.synthesize(u.lattice(), &spectra);
    let grad_gu_l6 = lp_norm_of_grid(&grad_grid, T::of(6.0))?;
    let lambda_gu_l6 = lp_norm(&fractional_laplacian(&gu, T::one()), T::of(6.0))?;
    let h1 = sobolev_norm(u, T::one());
    Ok(lhs / (grad_gu_l6 * h1 + lambda_gu_l6 * h1))
}

/// Ratio `|⟨B(u,v),w⟩| / ((‖u‖_{2θ₁+θ₂}‖w‖₀ + ‖u‖_{2θ₁}‖w‖_{θ₂})‖v‖_{θ₂})`; bounded
/// uniformly in the truncation when `θ₂ > 1/2` and `θ₁ + θ₂ ≥ 5/4`.
pub fn trilinear_bound_ratio<T: Scalar>(
    u: &SpectralField<T>,
    v: &SpectralField<T>,
    w: &SpectralField<T>,
    ctx: &ModelContext<T>,
) -> Result<T> {
    let (t1, t2) = (ctx.theta1(), ctx.theta2());
    let lhs = trilinear(u, v, w, ctx)?.abs();
    let rhs = (sobolev_norm(u, t1 + t1 + t2) * sobolev_norm(w, T::zero()) + sobolev_norm(u, t1 + t1) * sobolev_norm(w, t2))
        * sobolev_norm(v, t2);
    Ok(lhs / rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_field, sobolev_norm_sq, WaveIndex};

    fn ctx(n: usize, theta1: f64) -> ModelContext<f64> {
        ModelContext::with_params(1.0, 1.0, theta1, 1.0, n).unwrap()
    }

    /// Σ_{j+l=k} i(û_j·l) v̂_l over the full cube, then truncated and projected.
    fn brute_force_b(u: &SpectralField<f64>, v: &SpectralField<f64>) -> SpectralField<f64> {
        let n = u.truncation() as i32;
        let full: Vec<WaveIndex> = (-n..=n)
            .flat_map(|a| (-n..=n).flat_map(move |b| (-n..=n).map(move |c| [a, b, c])))
            .filter_map(WaveIndex::new)
            .collect();
        let mut out = SpectralField::zeros(u.truncation());
        for (idx, &k) in u.lattice().clone().modes().iter().enumerate() {
            let mut acc = [Complex::new(0.0, 0.0); 3];
            for &j in &full {
                let kc = k.components();
                let jc = j.components();
                let Some(l) = WaveIndex::new([kc[0] - jc[0], kc[1] - jc[1], kc[2] - jc[2]]) else {
                    continue;
                };
                if l.sup_norm() > u.truncation() {
                    continue;
                }
                let uj = u.get(j);
                let vl = v.get(l);
                let lc = l.components();
                let dot: Complex<f64> = (0..3).map(|m| uj[m] * lc[m] as f64).sum();
                let f = dot * Complex::new(0.0, 1.0);
                for i in 0..3 {
                    acc[i] += f * vl[i];
                }
            }
            out.set_at(idx, acc);
        }
        leray_project(&out)
    }

    fn rel(a: &SpectralField<f64>, b: &SpectralField<f64>) -> f64 {
        sobolev_norm(&a.sub(b).unwrap(), 0.0) / sobolev_norm(b, 0.0).max(1e-300)
    }

    #[test]
    fn single_mode_self_advection_vanishes() {
        let c = ctx(3, 1.0);
        let k = WaveIndex::new([1, 2, 0]).unwrap();
        let z = Complex::new(0.0, 0.0);
        let u = SpectralField::single_mode(3, k, [Complex::new(0.0, 0.3), z, Complex::new(0.7, -0.2)]).unwrap();
        let u = leray_project(&u);
        let b = bilinear_b(&u, &u, &c).unwrap();
        assert!(sobolev_norm(&b, 0.0) < 1e-14);
        assert!(sobolev_norm(&leray_nonlinearity(&u, &c).unwrap(), 0.0) < 1e-14);
    }

    #[test]
    fn zero_slots_give_zero() {
        let c = ctx(3, 1.0);
        let u = random_field::<f64>(3, 1, 1.0).unwrap();
        let z = SpectralField::zeros(3);
        // packed transforms mix round-off between the two halves of each FFT
        let scale = sobolev_norm(&u, 1.0).powi(2);
        assert!(sobolev_norm(&bilinear_b(&z, &u, &c).unwrap(), 0.0) <= 1e-14 * scale);
        assert!(sobolev_norm(&bilinear_b(&u, &z, &c).unwrap(), 0.0) <= 1e-14 * scale);
        assert_eq!(trilinear(&z, &z, &z, &c).unwrap(), 0.0);
    }

    #[test]
    fn cosine_pair_matches_hand_value() {
        // u = (0, cos x₁, 0), v = (0, 0, cos x₂): (u·∇)v = (0, 0, −cos x₁ sin x₂)
        let n = 2;
        let c = ctx(n, 1.0);
        let z = Complex::new(0.0, 0.0);
        let h = Complex::new(0.5, 0.0);
        let u = SpectralField::single_mode(n, WaveIndex::new([1, 0, 0]).unwrap(), [z, h, z]).unwrap();
        let v = SpectralField::single_mode(n, WaveIndex::new([0, 1, 0]).unwrap(), [z, z, h]).unwrap();
        let adv = advection(&u, &v, &c).unwrap();
        // −cos x₁ sin x₂ = Σ over (±1, ±1, 0) of ±(i/4) e^{ik·x}
        let coeff = adv.get(WaveIndex::new([1, 1, 0]).unwrap());
        assert!((coeff[2] - Complex::new(0.0, 0.25)).norm() < 1e-15);
        let coeff = adv.get(WaveIndex::new([1, -1, 0]).unwrap());
        assert!((coeff[2] - Complex::new(0.0, -0.25)).norm() < 1e-15);
        assert!(rel(&bilinear_b(&u, &v, &c).unwrap(), &brute_force_b(&u, &v)) < 1e-13);
    }

    #[test]
    fn pseudo_spectral_matches_convolution() {
        for seed in 0..3 {
            let n = 3;
            let c = ctx(n, 1.0);
            let u = random_field::<f64>(n, seed, 0.5).unwrap();
            let v = random_field::<f64>(n, seed + 100, 0.5).unwrap();
            assert!(rel(&bilinear_b(&u, &v, &c).unwrap(), &brute_force_b(&u, &v)) < 1e-12);
        }
    }

    #[test]
    fn cancellation_and_skew_symmetry() {
        for theta1 in [0.0, 0.25, 1.0, 1.5] {
            let c = ctx(5, theta1);
            let u = random_field::<f64>(5, 7, 1.0).unwrap();
            let v = random_field::<f64>(5, 8, 1.0).unwrap();
            let w = random_field::<f64>(5, 9, 1.0).unwrap();
            let gu = smoothing_g(&u, &c);
            let b = leray_nonlinearity(&u, &c).unwrap().inner(&u).unwrap();
            let scale = sobolev_norm(&gu, 1.0) * sobolev_norm(&u, 1.0) * sobolev_norm(&u, 0.0);
            assert!(b.abs() <= 1e-12 * scale, "theta1={theta1}: {b}");
            let a = trilinear(&u, &v, &w, &c).unwrap();
            let b = trilinear(&u, &w, &v, &c).unwrap();
            assert!((a + b).abs() <= 1e-12 * a.abs().max(b.abs()));
        }
    }

    #[test]
    fn leray_nonlinearity_is_b_of_filtered_field() {
        let c = ctx(4, 0.0);
        let u = random_field::<f64>(4, 3, 1.0).unwrap();
        let half = u.scale(0.5);
        let direct = bilinear_b(&half, &u, &c).unwrap();
        assert!(rel(&leray_nonlinearity(&u, &c).unwrap(), &direct) < 1e-14);
    }

    #[test]
    fn output_is_divergence_free() {
        let c = ctx(4, 1.0);
        let u = random_field::<f64>(4, 3, 1.0).unwrap();
        let b = leray_nonlinearity(&u, &c).unwrap();
        assert!(b.divergence_defect() < 1e-12);
    }

    #[test]
    fn mismatched_truncation_rejected() {
        let c = ctx(3, 1.0);
        let u = random_field::<f64>(3, 1, 1.0).unwrap();
        let v = random_field::<f64>(4, 1, 1.0).unwrap();
        assert!(matches!(bilinear_b(&u, &v, &c), Err(Error::TruncationMismatch { .. })));
    }

    #[test]
    fn commutator_vanishes_at_order_zero() {
        let f = random_field::<f64>(3, 1, 1.0).unwrap();
        let g = random_field::<f64>(3, 2, 1.0).unwrap();
        let c = commutator(0.0, &f, &g).unwrap();
        assert_eq!(c.truncation(), 6);
        let scale = sobolev_norm(&f, 0.0) * sobolev_norm(&g, 0.0);
        assert!(sobolev_norm_sq(&c, 0.0).sqrt() < 1e-14 * scale);
        assert!(commutator(-1.0, &f, &g).is_err());
    }

    #[test]
    fn advective_commutator_vanishes_at_order_zero() {
        let a = random_field::<f64>(3, 1, 1.0).unwrap();
        let u = random_field::<f64>(3, 2, 1.0).unwrap();
        let c = advective_commutator(0.0, &a, &u).unwrap();
        assert!(sobolev_norm(&c, 0.0) < 1e-14);
    }
}
