//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use leray_core::spectral::{sobolev_norm, SpectralField};
use leray_core::WaveIndex;
use num_complex::Complex;

pub type C = Complex<f64>;

pub fn full_cube(n: usize) -> Vec<[i32; 3]> {
    let n = n as i32;
    let mut out = Vec::new();
    for a in -n..=n {
        for b in -n..=n {
            for c in -n..=n {
                if (a, b, c) != (0, 0, 0) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

pub fn coeff(u: &SpectralField<f64>, k: [i32; 3]) -> [C; 3] {
    WaveIndex::new(k).map_or([C::new(0.0, 0.0); 3], |w| u.get(w))
}

/// `û − (û·k)k/|k|²` written out per component.
pub fn project_mode(k: [i32; 3], v: [C; 3]) -> [C; 3] {
    let kf = k.map(|x| x as f64);
    let q = kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2];
    let dot = v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2];
    [0, 1, 2].map(|i| v[i] - dot * (kf[i] / q))
}

/// `P_σ((u·∇)v)` truncated to the cube, by direct convolution
/// `Σ_{j+l=k} i(û_j·l) v̂_l` over every pair of lattice points.
pub fn brute_force_b(u: &SpectralField<f64>, v: &SpectralField<f64>) -> SpectralField<f64> {
    let n = u.truncation();
    let cube = full_cube(n);
    SpectralField::from_fn(n, |k| {
        let k = k.components();
        let mut acc = [C::new(0.0, 0.0); 3];
        for &j in &cube {
            let l = [k[0] - j[0], k[1] - j[1], k[2] - j[2]];
            if l == [0, 0, 0] || l.iter().any(|x| x.unsigned_abs() as usize > n) {
                continue;
            }
            let uj = coeff(u, j);
            let vl = coeff(v, l);
            let dot = uj[0] * l[0] as f64 + uj[1] * l[1] as f64 + uj[2] * l[2] as f64;
            let f = dot * C::new(0.0, 1.0);
            for i in 0..3 {
                acc[i] += f * vl[i];
            }
        }
        project_mode(k, acc)
    })
}

/// `Σ_{k∈cube} |k|^{2s}|û_k|²` by a loop over the whole cube (both halves).
pub fn brute_norm_sq(u: &SpectralField<f64>, s: f64) -> f64 {
    full_cube(u.truncation())
        .into_iter()
        .map(|k| {
            let q = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
            let c = coeff(u, k);
            q.powf(s) * (c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr())
        })
        .sum()
}

/// `G` applied mode by mode from its definition.
pub fn brute_g(u: &SpectralField<f64>, alpha: f64, theta1: f64) -> SpectralField<f64> {
    SpectralField::from_fn(u.truncation(), |k| {
        let q = k.norm_sq() as f64;
        let m = 1.0 / (1.0 + alpha.powf(2.0 * theta1) * q.powf(theta1));
        u.get(k).map(|z| z * m)
    })
}

pub fn rel(a: &SpectralField<f64>, b: &SpectralField<f64>) -> f64 {
    let d = a.sub(b).expect("same truncation");
    sobolev_norm(&d, 0.0) / sobolev_norm(b, 0.0).max(f64::MIN_POSITIVE)
}

/// Stationary second moment of `a_{n+1} = (a_n + σΔW)/(1 + λΔt)`.
pub fn discrete_ou_variance(sigma: f64, lambda: f64, dt: f64) -> f64 {
    sigma * sigma / (2.0 * lambda * (1.0 + 0.5 * lambda * dt))
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
