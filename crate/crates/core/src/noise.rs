//! Finite-dimensional realizations of the noise coefficient `g` and of the cylindrical
//! Wiener process driving it.
//!
//! The driver space `U` is truncated to `d` independent scalar Brownian motions
//! `W = (W_1, …, W_d)`, so `g(u)` is a list of `d` fields `g(u)e_j` and
//! `g(u)ΔW = Σ_j g(u)e_j ΔW_j`.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::{lambda_symbol, random_field, sobolev_norm, sobolev_norm_sq, Lattice, SpectralField, WaveIndex};

/// One driver of an additive or diagonal family: a wave vector and its amplitude `σ_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Driver<T> {
    pub mode: WaveIndex,
    pub amplitude: T,
    /// Real unit vector orthogonal to `mode` (used by the additive family).
    pub polarization: [T; 3],
}

impl<T: Scalar> Driver<T> {
    pub fn new(mode: WaveIndex, amplitude: T) -> Self {
        Driver {
            mode,
            amplitude,
            polarization: polarization(mode),
        }
    }
}

/// `k × e_a / |k × e_a|` with `e_a` the coordinate axis least aligned with `k`.
fn polarization<T: Scalar>(k: WaveIndex) -> [T; 3] {
    let c = k.components();
    let axis = (0..3).min_by_key(|&i| c[i].unsigned_abs()).unwrap();
    let mut e = [0i64; 3];
    e[axis] = 1;
    let k = c.map(|x| x as i64);
    let cross = [
        k[1] * e[2] - k[2] * e[1],
        k[2] * e[0] - k[0] * e[2],
        k[0] * e[1] - k[1] * e[0],
    ];
    let norm = ((cross.iter().map(|x| x * x).sum::<i64>()) as f64).sqrt();
    cross.map(|x| T::of(x as f64 / norm))
}

/// The shipped noise families.
#[derive(Clone, Debug, PartialEq)]
pub enum NoiseFamily<T> {
    /// `g(u)e_j = σ_j f_j` with `f_j` the unit-norm real mode `e_j cos(k_j·x)·√2`.
    Additive { drivers: Vec<Driver<T>> },
    /// `g(u)e_1 = σu`, one driver.
    LinearMultiplicative { sigma: T },
    /// `g(u)e_j = σ_j Π_{k_j} u`, the `±k_j` Fourier component of `u` scaled by `σ_j`.
    DiagonalSpectral { drivers: Vec<Driver<T>> },
}

/// The `count` stored modes of truncation `n` with smallest `|k|` (ties in lattice order),
/// with amplitudes `σ|k|^{-γ}`.
pub fn decay_drivers<T: Scalar>(n: usize, sigma: T, gamma: T, count: usize) -> Result<Vec<Driver<T>>> {
    let lattice = Lattice::shared(n);
    if count > lattice.len() {
        return Err(Error::invalid(
            "driver_dim",
            format!("{count} exceeds the {} modes of truncation {n}", lattice.len()),
        ));
    }
    let mut order: Vec<usize> = (0..lattice.len()).collect();
    order.sort_by_key(|&i| (lattice.norm_sq()[i], i));
    Ok(order[..count]
        .iter()
        .map(|&i| {
            let k = lattice.modes()[i];
            Driver::new(k, sigma * lambda_symbol(k.norm_sq(), -gamma))
        })
        .collect())
}

/// Anything usable as a noise coefficient `g`: the integrator and the auditor only
/// rely on this interface.
pub trait NoiseCoefficient<T: Scalar> {
    fn driver_dim(&self) -> usize;

    /// `g(u)w = Σ_j w_j g(u)e_j`.
    fn apply(&self, u: &SpectralField<T>, w: &[T]) -> Result<SpectralField<T>>;

    /// `‖Λ^s g(u)‖²_{L₂(U, H⁰)} = Σ_j ‖Λ^s g(u)e_j‖²`.
    fn hs_norm_sq(&self, u: &SpectralField<T>, s: T) -> T;

    /// `‖g(u) − g(v)‖²_{L₂(U, H⁰)}`.
    fn hs_distance_sq(&self, u: &SpectralField<T>, v: &SpectralField<T>) -> Result<T>;
}

impl<T: Scalar> NoiseFamily<T> {
    pub fn none() -> Self {
        NoiseFamily::Additive { drivers: Vec::new() }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseFamily::Additive { .. } => "additive",
            NoiseFamily::LinearMultiplicative { .. } => "linear_multiplicative",
            NoiseFamily::DiagonalSpectral { .. } => "diagonal_spectral",
        }
    }

    pub fn drivers(&self) -> &[Driver<T>] {
        match self {
            NoiseFamily::Additive { drivers } | NoiseFamily::DiagonalSpectral { drivers } => drivers,
            NoiseFamily::LinearMultiplicative { .. } => &[],
        }
    }

    /// Checks amplitudes are finite and non-negative and every driver mode fits truncation `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if let NoiseFamily::LinearMultiplicative { sigma } = self {
            if !sigma.is_finite() || *sigma < T::zero() {
                return Err(Error::invalid("sigma", "must be finite and >= 0"));
            }
        }
        for d in self.drivers() {
            if !d.amplitude.is_finite() || d.amplitude < T::zero() {
                return Err(Error::invalid("amplitudes", "must be finite and >= 0"));
            }
            if d.mode.sup_norm() > n {
                return Err(Error::invalid("modes", format!("{} lies outside truncation {n}", d.mode)));
            }
        }
        Ok(())
    }

    /// Closed-form bounds `(C₀, C₁)` with `‖g(u)‖²_HS ≤ C₀(1+‖u‖²_{L²})` and
    /// `‖Λg(u)‖²_HS ≤ C₁(1+‖u‖²₁)`, plus the Lipschitz constant in `L²`.
    pub fn closed_form_constants(&self) -> (T, T, T) {
        match self {
            NoiseFamily::LinearMultiplicative { sigma } => (*sigma * *sigma, *sigma * *sigma, *sigma),
            NoiseFamily::Additive { drivers } => {
                let c0 = drivers.iter().fold(T::zero(), |a, d| a + d.amplitude * d.amplitude);
                let c1 = drivers
                    .iter()
                    .fold(T::zero(), |a, d| a + d.amplitude * d.amplitude * T::of(d.mode.norm_sq() as f64));
                (c0, c1, T::zero())
            }
            NoiseFamily::DiagonalSpectral { drivers } => {
                // drivers sharing a mode act on the same coefficient; their σ² add up
                let mut per_mode: Vec<(WaveIndex, T)> = Vec::new();
                for d in drivers {
                    let key = if d.mode.is_representative() { d.mode } else { d.mode.neg() };
                    match per_mode.iter_mut().find(|(k, _)| *k == key) {
                        Some((_, s)) => *s = *s + d.amplitude * d.amplitude,
                        None => per_mode.push((key, d.amplitude * d.amplitude)),
                    }
                }
                let c = per_mode.iter().fold(T::zero(), |a, &(_, s)| a.max(s));
                (c, c, c.sqrt())
            }
        }
    }
}

impl<T: Scalar> NoiseCoefficient<T> for NoiseFamily<T> {
    fn driver_dim(&self) -> usize {
        match self {
            NoiseFamily::LinearMultiplicative { .. } => 1,
            NoiseFamily::Additive { drivers } | NoiseFamily::DiagonalSpectral { drivers } => drivers.len(),
        }
    }

    fn apply(&self, u: &SpectralField<T>, w: &[T]) -> Result<SpectralField<T>> {
        if w.len() != self.driver_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.driver_dim(),
                got: w.len(),
            });
        }
        match self {
            NoiseFamily::LinearMultiplicative { sigma } => Ok(u.scale(*sigma * w[0])),
            NoiseFamily::Additive { drivers } => {
                let mut out = SpectralField::zeros_on(u.lattice().clone());
                let inv_sqrt2 = T::FRAC_1_SQRT_2();
                for (d, &wj) in drivers.iter().zip(w) {
                    let a = d.amplitude * wj * inv_sqrt2;
                    let cur = out.get(d.mode);
                    let e = d.polarization;
                    let next = [0, 1, 2].map(|i| cur[i] + Complex::new(a * e[i], T::zero()));
                    out.set(d.mode, next)?;
                }
                Ok(out)
            }
            NoiseFamily::DiagonalSpectral { drivers } => {
                let mut out = SpectralField::zeros_on(u.lattice().clone());
                for (d, &wj) in drivers.iter().zip(w) {
                    let a = d.amplitude * wj;
                    let cur = out.get(d.mode);
                    let uk = u.get(d.mode);
                    out.set(d.mode, [0, 1, 2].map(|i| cur[i] + uk[i] * a))?;
                }
                Ok(out)
            }
        }
    }

    fn hs_norm_sq(&self, u: &SpectralField<T>, s: T) -> T {
        let two = T::of(2.0);
        match self {
            NoiseFamily::LinearMultiplicative { sigma } => *sigma * *sigma * sobolev_norm_sq(u, s),
            NoiseFamily::Additive { drivers } => drivers.iter().fold(T::zero(), |acc, d| {
                acc + d.amplitude * d.amplitude * lambda_symbol(d.mode.norm_sq(), two * s)
            }),
            NoiseFamily::DiagonalSpectral { drivers } => drivers.iter().fold(T::zero(), |acc, d| {
                let uk = u.get(d.mode);
                let e = uk[0].norm_sqr() + uk[1].norm_sqr() + uk[2].norm_sqr();
                acc + d.amplitude * d.amplitude * lambda_symbol(d.mode.norm_sq(), two * s) * two * e
            }),
        }
    }

    fn hs_distance_sq(&self, u: &SpectralField<T>, v: &SpectralField<T>) -> Result<T> {
        match self {
            NoiseFamily::Additive { .. } => Ok(T::zero()),
            // the remaining families are linear in u
            _ => Ok(self.hs_norm_sq(&u.sub(v)?, T::zero())),
        }
    }
}

/// Brownian increments `ΔW_j ~ N(0, dt)` for one driver dimension vector.
#[derive(Clone, Debug, PartialEq)]
pub struct WienerIncrement<T> {
    pub dt: T,
    pub values: Vec<T>,
}

/// Word offset between consecutive steps inside one ChaCha stream.
const WORDS_PER_STEP: u128 = 1 << 24;

/// Counter-based source of Wiener increments for one trajectory.
///
/// Step `s` of trajectory `id` under master seed `m` is drawn from ChaCha8 keyed by `m`,
/// stream `id`, starting at word `s · 2²⁴`; normals use the ziggurat sampler of
/// `rand_distr::StandardNormal`. The draws depend only on `(m, id, s)`, never on the order
/// in which trajectories or steps are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WienerStream {
    pub master_seed: u64,
    pub trajectory: u64,
}

impl WienerStream {
    pub fn new(master_seed: u64, trajectory: u64) -> Self {
        WienerStream {
            master_seed,
            trajectory,
        }
    }

    pub fn increment<T: Scalar>(&self, step: u64, dt: T, dim: usize) -> Result<WienerIncrement<T>> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::invalid("dt", "must be finite and > 0"));
        }
        // each normal consumes two 32-bit words on the common path; stay well inside the block
        if (dim as u128) * 8 > WORDS_PER_STEP {
            return Err(Error::invalid("driver_dim", "too many drivers for one stream step"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.trajectory);
        rng.set_word_pos(step as u128 * WORDS_PER_STEP);
        let sd = dt.sqrt().as_f64();
        let values = (0..dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                T::of(z * sd)
            })
            .collect();
        Ok(WienerIncrement { dt, values })
    }
}

/// `g(u)ΔW` for an increment.
pub fn apply_noise<T: Scalar, G: NoiseCoefficient<T> + ?Sized>(
    g: &G,
    u: &SpectralField<T>,
    incr: &WienerIncrement<T>,
) -> Result<SpectralField<T>> {
    g.apply(u, &incr.values)
}

/// Empirical constants at one norm scale.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditRung<T> {
    /// `‖u‖_{L²}` of the sampled fields.
    pub scale: T,
    /// `max ‖g(u)‖²_HS / (1 + ‖u‖²_{L²})`.
    pub growth_l2: T,
    /// `max ‖Λg(u)‖²_HS / (1 + ‖u‖₁²)`.
    pub growth_h1: T,
    /// `max ‖g(u) − g(v)‖_HS / ‖u − v‖_{L²}`: the envelope of `ρ₂ + ρ₃` at this scale.
    pub lipschitz: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport<T> {
    pub rungs: Vec<AuditRung<T>>,
    pub growth_l2: T,
    pub growth_h1: T,
    pub lipschitz: T,
    /// Set when a ratio more than doubles on each of the last two scale rungs.
    pub unbounded: bool,
}

impl<T: Scalar> std::fmt::Display for AuditReport<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "scale,growth_l2,growth_h1,lipschitz")?;
        for r in &self.rungs {
            writeln!(f, "{},{},{},{}", r.scale, r.growth_l2, r.growth_h1, r.lipschitz)?;
        }
        writeln!(f, "max growth_l2: {}", self.growth_l2)?;
        writeln!(f, "max growth_h1: {}", self.growth_h1)?;
        writeln!(f, "max lipschitz: {}", self.lipschitz)?;
        write!(f, "unbounded: {}", self.unbounded)
    }
}

/// Norm scales visited by the auditor.
pub const AUDIT_SCALES: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

/// Samples random divergence-free fields at escalating `L²` scales and reports the
/// empirical growth and local-Lipschitz envelopes of `g`.
pub fn audit_hypotheses<T: Scalar, G: NoiseCoefficient<T> + ?Sized>(
    g: &G,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<AuditReport<T>> {
    if samples < 2 {
        return Err(Error::invalid("samples", "need at least 2"));
    }
    let mut rungs = Vec::with_capacity(AUDIT_SCALES.len());
    for (r, &scale) in AUDIT_SCALES.iter().enumerate() {
        let scale = T::of(scale);
        let mut rung = AuditRung {
            scale,
            growth_l2: T::zero(),
            growth_h1: T::zero(),
            lipschitz: T::zero(),
        };
        for i in 0..samples {
            let base = seed.wrapping_add((r * samples + i) as u64 * 2);
            let u = normalized(random_field::<T>(n, base, T::one())?, scale);
            let dv = normalized(random_field::<T>(n, base + 1, T::one())?, scale * T::of(0.1));
            let v = u.add(&dv)?;
            let l2 = sobolev_norm_sq(&u, T::zero());
            let h1 = sobolev_norm_sq(&u, T::one());
            rung.growth_l2 = rung.growth_l2.max(g.hs_norm_sq(&u, T::zero()) / (T::one() + l2));
            rung.growth_h1 = rung.growth_h1.max(g.hs_norm_sq(&u, T::one()) / (T::one() + h1));
            let lip = g.hs_distance_sq(&u, &v)?.sqrt() / sobolev_norm(&dv, T::zero());
            rung.lipschitz = rung.lipschitz.max(lip);
        }
        rungs.push(rung);
    }
    let grows = |f: fn(&AuditRung<T>) -> T| {
        let v: Vec<T> = rungs.iter().map(f).collect();
        let k = v.len();
        k >= 3 && v[k - 1] > T::of(2.0) * v[k - 2] && v[k - 2] > T::of(2.0) * v[k - 3]
    };
    let unbounded = grows(|r| r.growth_l2) || grows(|r| r.growth_h1) || grows(|r| r.lipschitz);
    let max = |f: fn(&AuditRung<T>) -> T| rungs.iter().map(f).fold(T::zero(), T::max);
    Ok(AuditReport {
        growth_l2: max(|r| r.growth_l2),
        growth_h1: max(|r| r.growth_h1),
        lipschitz: max(|r| r.lipschitz),
        unbounded,
        rungs,
    })
}

fn normalized<T: Scalar>(u: SpectralField<T>, target: T) -> SpectralField<T> {
    let norm = sobolev_norm(&u, T::zero());
    u.scale(target / norm)
}
