mod common;

use leray_core::diagnostics::{
    classify_regime, ensemble_moments, jackknife_mean, theorem44_exponent, Regime,
};
use leray_core::integrator::{run_trajectory, InitialCondition, RunConfig, TrajectoryRecord};
use leray_core::noise::{decay_drivers, NoiseFamily};
use leray_core::{Error, ModelContext};
use proptest::prelude::*;

fn ou_records(count: u64) -> Vec<TrajectoryRecord<f64>> {
    let ctx = ModelContext::with_params(1.0, 1.0, 0.0, 1.0, 1).unwrap();
    let mut cfg = RunConfig::new(ctx, 0.1, 1.0);
    cfg.nonlinear = false;
    cfg.noise = NoiseFamily::Additive {
        drivers: decay_drivers(1, 1.0, 0.0, 6).unwrap(),
    };
    (0..count)
        .map(|id| {
            cfg.trajectory = id;
            run_trajectory(&cfg).unwrap()
        })
        .collect()
}

#[test]
fn degenerate_ensemble_has_zero_standard_error() {
    let ctx = ModelContext::with_params(0.5, 1.0, 1.0, 1.0, 3).unwrap();
    let mut cfg = RunConfig::new(ctx, 0.05, 0.5);
    cfg.initial = InitialCondition::Random {
        seed: 4,
        slope: 2.0,
        amplitude: 1.0,
    };
    let records: Vec<_> = (0..8)
        .map(|id| {
            cfg.trajectory = id;
            run_trajectory(&cfg).unwrap()
        })
        .collect();
    let many = ensemble_moments(&records, 3.0).unwrap();
    let one = ensemble_moments(&records[..1], 3.0).unwrap();
    for (a, b) in [
        (many.sup_l2, one.sup_l2),
        (many.sup_h1, one.sup_h1),
        (many.int_theta2, one.int_theta2),
        (many.int_theta2p1, one.int_theta2p1),
        (many.final_energy, one.final_energy),
    ] {
        assert_eq!(a.se, 0.0);
        assert_eq!(b.se, 0.0);
        assert_eq!(a.mean, b.mean);
    }
    assert!(many.reliable && !one.reliable);
    let sup = records[0].samples.iter().map(|s| s.norm_l2).fold(0.0, f64::max);
    assert_eq!(one.sup_l2.mean, sup.powf(3.0));
}

#[test]
fn standard_error_shrinks_like_inverse_square_root() {
    let records = ou_records(2000);
    let half = ensemble_moments(&records[..1000], 2.0).unwrap();
    let full = ensemble_moments(&records, 2.0).unwrap();
    for (a, b) in [(half.final_energy, full.final_energy), (half.sup_l2, full.sup_l2), (half.int_theta2, full.int_theta2)] {
        let ratio = b.se / a.se;
        assert!((0.6..=0.82).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn mixed_and_empty_ensembles_rejected() {
    let mut records = ou_records(3);
    assert!(matches!(ensemble_moments::<f64>(&[], 2.0), Err(Error::EmptyEnsemble)));
    assert!(ensemble_moments(&records, 1.5).is_err());
    records[2].signature.push('x');
    assert!(matches!(ensemble_moments(&records, 2.0), Err(Error::MixedEnsemble { index: 2 })));
}

#[test]
fn jackknife_is_the_delete_one_formula() {
    let xs = [0.3, 1.7, 2.2, 0.9, 4.1, 3.3];
    let n = xs.len() as f64;
    let loo: Vec<f64> = (0..xs.len())
        .map(|i| xs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| x).sum::<f64>() / (n - 1.0))
        .collect();
    let m = loo.iter().sum::<f64>() / n;
    let se = ((n - 1.0) / n * loo.iter().map(|x| (x - m).powi(2)).sum::<f64>()).sqrt();
    assert!((jackknife_mean(&xs).se - se).abs() < 1e-14);
}

#[test]
fn regime_anchor_points() {
    assert_eq!(classify_regime(1.0, 1.0).regime, Regime::GlobalH0);
    assert_eq!(classify_regime(0.0, 1.25).regime, Regime::GlobalH0);
    assert_eq!(classify_regime(0.0, 1.0).regime, Regime::LocalOnly);
    assert_eq!(classify_regime(0.25, 1.0).regime, Regime::GlobalH0);
}

#[test]
fn regime_map_is_total_and_monotone() {
    let t1: Vec<f64> = (0..50).map(|i| 2.0 * i as f64 / 49.0).collect();
    let t2: Vec<f64> = (1..=50).map(|i| 2.0 * i as f64 / 50.0).collect();
    for i in 0..50 {
        for j in 0..50 {
            let r = classify_regime(t1[i], t2[j]).regime;
            if i + 1 < 50 {
                assert!(classify_regime(t1[i + 1], t2[j]).regime >= r);
            }
            if j + 1 < 50 {
                assert!(classify_regime(t1[i], t2[j + 1]).regime >= r);
            }
        }
    }
}

#[test]
fn exponent_decreases_in_theta1_on_first_branch() {
    let theta2 = 1.0;
    let mut last = f64::INFINITY;
    for i in 1..40 {
        let theta1 = 0.25 + 0.5 * i as f64 / 40.0;
        if theta1 + theta2 / 2.0 >= 1.25 {
            break;
        }
        let m = theorem44_exponent(theta1, theta2).unwrap();
        assert!(m.is_finite() && m < last);
        last = m;
    }
}

proptest! {
    #[test]
    fn exponent_defined_exactly_on_subcritical_region(t1 in 0.0f64..2.0, t2 in 0.01f64..2.0) {
        let m = theorem44_exponent(t1, t2);
        if t1 + t2 > 1.25 {
            let m = m.unwrap();
            prop_assert!(m.is_finite() && m > 1.0);
            if t1 + t2 / 2.0 >= 1.25 {
                prop_assert_eq!(m, 2.0 + 1.0 / t2);
            }
        } else {
            prop_assert!(m.is_err());
        }
    }
}
