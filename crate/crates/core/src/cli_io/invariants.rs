//! Property checks run by `leray check-invariants` against a configured model.

use std::fmt;

use num_complex::Complex;

use crate::diagnostics::{classify_regime, Regime};
use crate::error::Result;
use crate::integrator::{step, RunConfig};
use crate::noise::{NoiseCoefficient, NoiseFamily, WienerStream};
use crate::nonlinear::{bilinear_b, leray_nonlinearity, trilinear};
use crate::spectral::{
    fractional_laplacian, leray_project, random_field, smoothing_g, sobolev_norm, sobolev_norm_sq, to_physical,
    to_spectral, ModelContext, SpectralField,
};

/// Relative tolerance of exact algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Relative tolerance of the convective cancellation identities.
pub const CANCELLATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed defect, relative to the natural scale of the check.
    pub worst: f64,
    pub tolerance: f64,
}

impl fmt::Display for InvariantCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<28} worst {:.3e} (tol {:.0e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance
        )
    }
}

fn rel_diff(a: &SpectralField<f64>, b: &SpectralField<f64>) -> f64 {
    let scale = sobolev_norm(a, 0.0).max(sobolev_norm(b, 0.0));
    match a.sub(b) {
        Ok(d) if scale > 0.0 => sobolev_norm(&d, 0.0) / scale,
        Ok(d) => sobolev_norm(&d, 0.0),
        Err(_) => f64::INFINITY,
    }
}

/// A field with a nonzero gradient part, so projection has something to remove.
fn unprojected(n: usize, seed: u64) -> Result<SpectralField<f64>> {
    let u = random_field::<f64>(n, seed, 1.0)?;
    let phase = random_field::<f64>(n, seed ^ 0x5eed, 1.0)?;
    let lattice = u.lattice().clone();
    let mut out = u.clone();
    for (i, k) in lattice.modes().iter().enumerate() {
        let c = phase.at(i)[0];
        let k = k.components().map(|x| Complex::new(x as f64, 0.0));
        let v = u.at(i);
        out.set_at(i, [v[0] + c * k[0], v[1] + c * k[1], v[2] + c * k[2]]);
    }
    Ok(out)
}

struct Check {
    name: &'static str,
    tolerance: f64,
    worst: f64,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Check {
            name,
            tolerance,
            worst: 0.0,
        }
    }

    fn observe(&mut self, defect: f64) {
        // NaN defects count as failures
        if defect.is_nan() || defect > self.worst {
            self.worst = if defect.is_nan() { f64::INFINITY } else { defect };
        }
    }

    fn finish(self) -> InvariantCheck {
        InvariantCheck {
            name: self.name,
            passed: self.worst <= self.tolerance,
            worst: self.worst,
            tolerance: self.tolerance,
        }
    }
}

/// Runs every check on `samples` random fields of the model's truncation.
pub fn run_invariant_suite(ctx: &ModelContext<f64>, noise: &NoiseFamily<f64>, samples: usize, seed: u64) -> Result<Vec<InvariantCheck>> {
    let n = ctx.truncation();
    let (t1, t2) = (ctx.theta1(), ctx.theta2());
    let mut projection = Check::new("projection_idempotent", ALGEBRAIC_TOL);
    let mut semigroup = Check::new("lambda_semigroup", ALGEBRAIC_TOL);
    let mut commute = Check::new("operators_commute", ALGEBRAIC_TOL);
    let mut norm_id = Check::new("norm_identity", ALGEBRAIC_TOL);
    let mut interp = Check::new("interpolation", ALGEBRAIC_TOL);
    let mut smoothing = Check::new("smoothing_bound", ALGEBRAIC_TOL);
    let mut round_trip = Check::new("transform_round_trip", ALGEBRAIC_TOL);
    let mut cancel = Check::new("cancellation", CANCELLATION_TOL);
    let mut skew = Check::new("skew_symmetry", CANCELLATION_TOL);
    let mut linearity = Check::new("noise_linearity", ALGEBRAIC_TOL);
    let mut growth = Check::new("noise_growth_bounds", ALGEBRAIC_TOL);
    let mut range = Check::new("noise_range_divergence_free", ALGEBRAIC_TOL);
    let mut structure = Check::new("step_preserves_structure", ALGEBRAIC_TOL);
    let mut contraction = Check::new("linear_contraction", 0.0);

    let (c0, c1, _) = noise.closed_form_constants();
    let dim = noise.driver_dim();
    let grid = 2 * n + 2;

    for i in 0..samples as u64 {
        let s = seed.wrapping_add(3 * i);
        let u = random_field::<f64>(n, s, 1.0)?;
        let v = random_field::<f64>(n, s + 1, 1.0)?;
        let w = random_field::<f64>(n, s + 2, 1.0)?;

        let raw = unprojected(n, s)?;
        let p1 = leray_project(&raw);
        projection.observe(rel_diff(&leray_project(&p1), &p1));
        projection.observe(p1.divergence_defect() / sobolev_norm(&p1, 1.0));

        semigroup.observe(rel_diff(
            &fractional_laplacian(&fractional_laplacian(&u, 0.7), 0.6),
            &fractional_laplacian(&u, 1.3),
        ));
        semigroup.observe(rel_diff(&fractional_laplacian(&u, 0.0), &u));

        let gl = smoothing_g(&fractional_laplacian(&raw, 0.5), ctx);
        let lg = fractional_laplacian(&smoothing_g(&raw, ctx), 0.5);
        commute.observe(rel_diff(&gl, &lg));
        commute.observe(rel_diff(&leray_project(&gl), &smoothing_g(&leray_project(&fractional_laplacian(&raw, 0.5)), ctx)));

        for s in [-0.5, 0.5, 1.0, t2] {
            let a = sobolev_norm(&u, s);
            norm_id.observe((a - sobolev_norm(&fractional_laplacian(&u, s), 0.0)).abs() / a);
        }

        for (delta, theta) in [(0.5, 1.0), (1.0, 1.25), (t2, t2 + 1.0)] {
            let lhs = sobolev_norm(&u, delta);
            let rhs = sobolev_norm(&u, 0.0).powf(1.0 - delta / theta) * sobolev_norm(&u, theta).powf(delta / theta);
            interp.observe((lhs - rhs) / rhs);
        }

        let gu = smoothing_g(&u, ctx);
        for s in [0.0, 1.0] {
            let lhs = sobolev_norm(&gu, s + 2.0 * t1);
            let rhs = ctx.alpha().powf(-2.0 * t1) * sobolev_norm(&u, s);
            smoothing.observe((lhs - rhs) / rhs);
        }

        let back = to_spectral(&to_physical(&u, grid)?, n)?;
        round_trip.observe(rel_diff(&back, &u));

        let scale = sobolev_norm(&gu, 1.0) * sobolev_norm(&u, 1.0) * sobolev_norm(&u, 0.0);
        cancel.observe(leray_nonlinearity(&u, ctx)?.inner(&u)?.abs() / scale);
        let a = trilinear(&u, &v, &w, ctx)?;
        let b = trilinear(&u, &w, &v, ctx)?;
        let scale = sobolev_norm(&u, 1.0) * sobolev_norm(&v, 1.0) * sobolev_norm(&w, 1.0);
        skew.observe((a + b).abs() / scale);

        if dim > 0 {
            let stream = WienerStream::new(seed, i);
            let x = stream.increment::<f64>(0, 1.0, dim)?.values;
            let y = stream.increment::<f64>(1, 1.0, dim)?.values;
            let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| 0.3 * p - 1.7 * q).collect();
            let lhs = noise.apply(&u, &combo)?;
            let rhs = noise.apply(&u, &x)?.scale(0.3).axpy(-1.7, &noise.apply(&u, &y)?)?;
            linearity.observe(rel_diff(&lhs, &rhs));
            let out = noise.apply(&u, &x)?;
            let h1 = sobolev_norm(&out, 1.0);
            if h1 > 0.0 {
                range.observe(out.divergence_defect() / h1);
            }
        }
        for scale in [1.0, 100.0] {
            let us = u.scale(scale);
            let g0 = noise.hs_norm_sq(&us, 0.0) / (1.0 + sobolev_norm_sq(&us, 0.0));
            let g1 = noise.hs_norm_sq(&us, 1.0) / (1.0 + sobolev_norm_sq(&us, 1.0));
            growth.observe(((g0 - c0) / c0.max(f64::MIN_POSITIVE)).max(0.0));
            growth.observe(((g1 - c1) / c1.max(f64::MIN_POSITIVE)).max(0.0));
        }

        let mut cfg = RunConfig::new(ctx.clone(), 1e-3, 1.0);
        cfg.noise = noise.clone();
        cfg.seed = seed;
        cfg.trajectory = i;
        let mut state = cfg.initial_state()?;
        state.u = u.clone();
        let (next, _) = step(&state, &cfg)?;
        structure.observe(next.u.divergence_defect() / sobolev_norm(&next.u, 1.0));

        cfg.noise = NoiseFamily::none();
        cfg.nonlinear = false;
        let (next, _) = step(&state, &cfg)?;
        contraction.observe((sobolev_norm(&next.u, 0.0) - sobolev_norm(&u, 0.0)).max(0.0));
    }

    let mut monotone = Check::new("classifier_monotone", 0.0);
    let axis1: Vec<f64> = (0..50).map(|i| 2.0 * i as f64 / 49.0).collect();
    let axis2: Vec<f64> = (1..=50).map(|i| 2.0 * i as f64 / 50.0).collect();
    for (a, &x) in axis1.iter().enumerate() {
        for (b, &y) in axis2.iter().enumerate() {
            let r = classify_regime(x, y).regime;
            let worse = |other: Regime| if other < r { 1.0 } else { 0.0 };
            if a + 1 < axis1.len() {
                monotone.observe(worse(classify_regime(axis1[a + 1], y).regime));
            }
            if b + 1 < axis2.len() {
                monotone.observe(worse(classify_regime(x, axis2[b + 1]).regime));
            }
        }
    }

    // B must stay divergence-free for any pair, not only B(Gu, u)
    let mut div_b = Check::new("nonlinearity_divergence_free", ALGEBRAIC_TOL);
    if samples > 0 {
        let u = random_field::<f64>(n, seed ^ 0xb, 1.0)?;
        let v = random_field::<f64>(n, seed ^ 0xc, 1.0)?;
        let b = bilinear_b(&u, &v, ctx)?;
        div_b.observe(b.divergence_defect() / sobolev_norm(&b, 1.0).max(f64::MIN_POSITIVE));
    }

    Ok([
        projection,
        semigroup,
        commute,
        norm_id,
        interp,
        smoothing,
        round_trip,
        cancel,
        skew,
        div_b,
        linearity,
        growth,
        range,
        structure,
        contraction,
        monotone,
    ]
    .into_iter()
    .map(Check::finish)
    .collect())
}
