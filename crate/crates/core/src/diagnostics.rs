//! Energy ledgers, Monte-Carlo moment estimates and the well-posedness regime map.

use std::fmt;

use crate::error::{Error, Result};
use crate::integrator::{Sample, TrajectoryRecord};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LedgerNorm {
    /// `d‖u‖² + 2ν‖u‖²_{θ₂}dt = ‖g(u)‖²_HS dt + 2⟨g(u)dW, u⟩`.
    L2,
    /// The same identity for `Λu`, with `θ₂ + 1` and `Λg`; the convective transfer no
    /// longer cancels and is booked separately.
    H1,
}

/// One step of the discrete Itô balance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyLedgerEntry<T> {
    /// Time at the end of the step.
    pub t: T,
    /// `‖uⁿ⁺¹‖²` in the ledger norm.
    pub kinetic: T,
    /// `2ν‖uⁿ⁺¹‖²_{θ₂(+1)} Δt`.
    pub dissipation: T,
    pub injection: T,
    pub martingale: T,
    /// Nonlinear transfer `2χΔt⟨B(uⁿ), Λ^{2s}uⁿ⟩`; zero up to round-off in `L²`.
    pub transfer: T,
    /// `Δ‖u‖² + dissipation + transfer − injection − martingale`.
    pub residual: T,
}

/// Per-step ledger of a (possibly halted) record.
pub fn energy_ledger<T: Scalar>(record: &TrajectoryRecord<T>, norm: LedgerNorm) -> Vec<EnergyLedgerEntry<T>> {
    let idx = match norm {
        LedgerNorm::L2 => 0,
        LedgerNorm::H1 => 1,
    };
    let energy = |s: &Sample<T>| match norm {
        LedgerNorm::L2 => s.norm_l2 * s.norm_l2,
        LedgerNorm::H1 => s.norm_h1 * s.norm_h1,
    };
    let diss = |s: &Sample<T>| match norm {
        LedgerNorm::L2 => s.norm_theta2 * s.norm_theta2,
        LedgerNorm::H1 => s.norm_theta2p1 * s.norm_theta2p1,
    };
    let two = T::of(2.0);
    record
        .samples
        .windows(2)
        .zip(&record.terms)
        .map(|(w, terms)| {
            let kinetic = energy(&w[1]);
            let dissipation = two * record.nu * diss(&w[1]) * record.dt;
            let injection = terms.injection[idx];
            let martingale = terms.martingale[idx];
            let transfer = terms.transfer[idx];
            EnergyLedgerEntry {
                t: w[1].t,
                kinetic,
                dissipation,
                injection,
                martingale,
                transfer,
                residual: kinetic - energy(&w[0]) + dissipation + transfer - injection - martingale,
            }
        })
        .collect()
}

/// Mean of `|residual|` over the entries (0 for an empty ledger).
pub fn mean_abs_residual<T: Scalar>(entries: &[EnergyLedgerEntry<T>]) -> T {
    if entries.is_empty() {
        return T::zero();
    }
    let sum = entries.iter().fold(T::zero(), |a, e| a + e.residual.abs());
    sum / T::of(entries.len() as f64)
}

/// A Monte-Carlo estimate with its jackknife standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub mean: T,
    pub se: T,
}

/// Sample mean and leave-one-out jackknife standard error. Both are computed relative to
/// the first value, so an ensemble of identical values gives that value and `se = 0`
/// exactly.
pub fn jackknife_mean<T: Scalar>(values: &[T]) -> Estimate<T> {
    let n = values.len();
    if n == 0 {
        return Estimate {
            mean: T::nan(),
            se: T::nan(),
        };
    }
    let x0 = values[0];
    let nf = T::of(n as f64);
    let shifted_sum = values.iter().fold(T::zero(), |a, &x| a + (x - x0));
    let mean = x0 + shifted_sum / nf;
    if n == 1 {
        return Estimate { mean, se: T::zero() };
    }
    let m1 = T::of((n - 1) as f64);
    // leave-one-out means, shifted by x0
    let loo: Vec<T> = values.iter().map(|&x| (shifted_sum - (x - x0)) / m1).collect();
    let loo_mean = loo.iter().fold(T::zero(), |a, &x| a + x) / nf;
    let ss = loo.iter().fold(T::zero(), |a, &x| a + (x - loo_mean) * (x - loo_mean));
    Estimate {
        mean,
        se: (m1 / nf * ss).sqrt(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStats<T> {
    pub size: usize,
    pub p: T,
    /// `E sup_t ‖u‖^p_{L²}` over grid times.
    pub sup_l2: Estimate<T>,
    /// `E sup_t ‖u‖^p_{H¹}` over grid times.
    pub sup_h1: Estimate<T>,
    /// `E ∫ ‖u‖^{p−2}_{L²} ‖u‖²_{θ₂} dt`.
    pub int_theta2: Estimate<T>,
    /// `E ∫ ‖u‖^{p−2}_{H¹} ‖u‖²_{θ₂+1} dt`.
    pub int_theta2p1: Estimate<T>,
    /// `E ‖u(T)‖²_{L²}` at the last recorded time.
    pub final_energy: Estimate<T>,
    /// Records that hit a non-finite halt.
    pub blowups: usize,
    /// `false` below 8 records, where the standard errors are not meaningful.
    pub reliable: bool,
}

pub const MIN_RELIABLE_ENSEMBLE: usize = 8;

fn trapezoid<T: Scalar>(samples: &[Sample<T>], f: impl Fn(&Sample<T>) -> T) -> T {
    let half = T::of(0.5);
    samples
        .windows(2)
        .fold(T::zero(), |a, w| a + half * (w[1].t - w[0].t) * (f(&w[0]) + f(&w[1])))
}

/// Moment estimates over an ensemble produced by one configuration.
pub fn ensemble_moments<T: Scalar>(records: &[TrajectoryRecord<T>], p: T) -> Result<EnsembleStats<T>> {
    if !(p >= T::of(2.0)) || !p.is_finite() {
        return Err(Error::invalid("p", "must be finite and >= 2"));
    }
    let first = records.first().ok_or(Error::EmptyEnsemble)?;
    if let Some(index) = records.iter().position(|r| r.signature != first.signature) {
        return Err(Error::MixedEnsemble { index });
    }
    let two = T::of(2.0);
    let collect = |f: &dyn Fn(&TrajectoryRecord<T>) -> T| jackknife_mean(&records.iter().map(f).collect::<Vec<_>>());
    let sup = |r: &TrajectoryRecord<T>, g: fn(&Sample<T>) -> T| r.samples.iter().map(g).fold(T::zero(), T::max);
    Ok(EnsembleStats {
        size: records.len(),
        p,
        sup_l2: collect(&|r| sup(r, |s| s.norm_l2).powf(p)),
        sup_h1: collect(&|r| sup(r, |s| s.norm_h1).powf(p)),
        int_theta2: collect(&|r| trapezoid(&r.samples, |s| s.norm_l2.powf(p - two) * s.norm_theta2 * s.norm_theta2)),
        int_theta2p1: collect(&|r| {
            trapezoid(&r.samples, |s| s.norm_h1.powf(p - two) * s.norm_theta2p1 * s.norm_theta2p1)
        }),
        final_energy: collect(&|r| {
            let s = r.samples.last().expect("records hold the initial sample");
            s.norm_l2 * s.norm_l2
        }),
        blowups: records.iter().filter(|r| r.blew_up()).count(),
        reliable: records.len() >= MIN_RELIABLE_ENSEMBLE,
    })
}

/// Moment-growth exponent `m` for subcritical parameters `θ₁ + θ₂ > 5/4`:
/// `1 + (1+θ₂)/(2(θ₁+θ₂−5/4))` when `θ₁ + θ₂/2 < 5/4`, else `2 + 1/θ₂`.
pub fn theorem44_exponent<T: Scalar>(theta1: T, theta2: T) -> Result<T> {
    let five_quarters = T::of(1.25);
    let one = T::one();
    let two = T::of(2.0);
    if !(theta1 >= T::zero()) || !(theta2 > T::zero()) {
        return Err(Error::invalid("theta", "need theta1 >= 0 and theta2 > 0"));
    }
    if !(theta1 + theta2 > five_quarters) {
        return Err(Error::invalid("theta", "requires theta1 + theta2 > 5/4"));
    }
    if theta1 + theta2 / two < five_quarters {
        Ok(one + (one + theta2) / (two * (theta1 + theta2 - five_quarters)))
    } else {
        Ok(two + one / theta2)
    }
}

/// Strongest available well-posedness statement, weakest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Regime {
    Outside,
    /// Maximal local strong solutions in `H¹`.
    LocalOnly,
    /// Global strong solutions with `H¹` data.
    GlobalH1,
    /// Global solutions with `L²` data.
    GlobalH0,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Outside => "outside",
            Regime::LocalOnly => "local-only",
            Regime::GlobalH1 => "global-H1",
            Regime::GlobalH0 => "global-H0",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeVerdict<T> {
    pub theta1: T,
    pub theta2: T,
    pub regime: Regime,
}

pub fn classify_regime<T: Scalar>(theta1: T, theta2: T) -> RegimeVerdict<T> {
    let sum = theta1 + theta2;
    let regime = if !(theta2 > T::zero()) || !(theta1 >= T::zero()) {
        Regime::Outside
    } else if theta2 > T::of(0.5) && sum >= T::of(1.25) {
        Regime::GlobalH0
    } else if sum >= T::of(1.25) {
        Regime::GlobalH1
    } else if sum > T::of(0.75) {
        Regime::LocalOnly
    } else {
        Regime::Outside
    };
    RegimeVerdict { theta1, theta2, regime }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_case_split() {
        assert_eq!(theorem44_exponent(0.0, 1.5).unwrap(), 6.0);
        assert_eq!(theorem44_exponent(1.0, 1.0).unwrap(), 3.0);
        assert!(theorem44_exponent(0.0, 1.25).is_err());
        assert!(theorem44_exponent(0.1, 0.5).is_err());
    }

    #[test]
    fn anchor_regimes() {
        assert_eq!(classify_regime(1.0, 1.0).regime, Regime::GlobalH0);
        assert_eq!(classify_regime(0.0, 1.25).regime, Regime::GlobalH0);
        assert_eq!(classify_regime(0.0, 1.0).regime, Regime::LocalOnly);
        assert_eq!(classify_regime(0.25, 1.0).regime, Regime::GlobalH0);
        assert_eq!(classify_regime(1.0, 0.5).regime, Regime::GlobalH1);
        assert_eq!(classify_regime(0.25, 0.25).regime, Regime::Outside);
        assert_eq!(classify_regime(1.0, 0.0).regime, Regime::Outside);
    }

    #[test]
    fn jackknife_identical_values() {
        let e = jackknife_mean(&[0.1f64 + 0.2; 17]);
        assert_eq!(e.mean, 0.1 + 0.2);
        assert_eq!(e.se, 0.0);
        let e = jackknife_mean(&[3.0f64]);
        assert_eq!((e.mean, e.se), (3.0, 0.0));
    }

    #[test]
    fn jackknife_matches_standard_error_of_mean() {
        let xs = [1.0f64, 4.0, 2.0, 8.0, 5.0];
        let e = jackknife_mean(&xs);
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((e.mean - mean).abs() < 1e-15);
        assert!((e.se - (var / 5.0).sqrt()).abs() < 1e-14);
    }
}
