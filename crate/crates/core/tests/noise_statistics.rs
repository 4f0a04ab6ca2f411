mod common;

use leray_core::noise::{audit_hypotheses, decay_drivers, Driver, NoiseCoefficient, NoiseFamily, WienerStream};
use leray_core::spectral::{random_field, sobolev_norm_sq};
use leray_core::WaveIndex;
use proptest::prelude::*;

const DRAWS: usize = 100_000;

fn draws(stream: WienerStream, dt: f64) -> Vec<f64> {
    // many steps with a few drivers each exercise both stream axes
    (0..(DRAWS / 4) as u64)
        .flat_map(|s| stream.increment::<f64>(s, dt, 4).unwrap().values)
        .collect()
}

#[test]
fn increments_have_mean_zero_and_variance_dt() {
    let dt = 0.01;
    let x = draws(WienerStream::new(17, 0), dt);
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!(mean.abs() <= 4.0 * (dt / n).sqrt(), "mean {mean}");
    assert!((var / dt - 1.0).abs() <= 0.05, "var {var}");
}

#[test]
fn distinct_trajectories_are_uncorrelated() {
    let a = draws(WienerStream::new(3, 0), 1.0);
    let b = draws(WienerStream::new(3, 1), 1.0);
    let c = draws(WienerStream::new(4, 0), 1.0);
    let corr = |x: &[f64], y: &[f64]| {
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let sxy: f64 = x.iter().zip(y).map(|(p, q)| (p - mx) * (q - my)).sum();
        let sxx: f64 = x.iter().map(|p| (p - mx).powi(2)).sum();
        let syy: f64 = y.iter().map(|q| (q - my).powi(2)).sum();
        sxy / (sxx * syy).sqrt()
    };
    let bound = 4.0 / (DRAWS as f64).sqrt();
    assert!(corr(&a, &b).abs() < bound);
    assert!(corr(&a, &c).abs() < bound);
    // consecutive steps of one stream are independent too
    assert!(corr(&a[..DRAWS - 4], &a[4..]).abs() < bound);
}

#[test]
fn additive_hs_norm_matches_fieldwise_sum() {
    let drivers = decay_drivers::<f64>(3, 0.8, 1.5, 10).unwrap();
    let g = NoiseFamily::Additive { drivers };
    let u = random_field::<f64>(3, 2, 1.0).unwrap();
    for s in [0.0, 1.0] {
        let by_fields: f64 = (0..10)
            .map(|j| {
                let mut w = vec![0.0; 10];
                w[j] = 1.0;
                sobolev_norm_sq(&g.apply(&u, &w).unwrap(), s)
            })
            .sum();
        let formula = g.hs_norm_sq(&u, s);
        assert!((by_fields - formula).abs() <= 1e-14 * formula);
    }
}

#[test]
fn diagonal_growth_bounded_by_largest_amplitude() {
    let modes = [[1, 0, 0], [0, 1, 1], [2, -1, 0]];
    let amps = [0.3, 0.9, 0.5];
    let drivers = modes
        .iter()
        .zip(amps)
        .map(|(&k, a)| Driver::new(WaveIndex::new(k).unwrap(), a))
        .collect();
    let g = NoiseFamily::DiagonalSpectral { drivers };
    let max_sq = amps.iter().map(|a| a * a).fold(0.0, f64::max);
    let rep = audit_hypotheses::<f64, _>(&g, 3, 6, 9).unwrap();
    assert!(rep.growth_l2 <= max_sq * (1.0 + 1e-12));
    assert!(rep.growth_h1 <= max_sq * (1.0 + 1e-12));
    assert!(rep.lipschitz <= max_sq.sqrt() * (1.0 + 1e-12));
    assert!(!rep.unbounded);
    assert_eq!(g.closed_form_constants().0, max_sq);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn noise_is_linear_in_the_increment(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0, family in 0usize..3) {
        let k = WaveIndex::new([1, 2, 0]).unwrap();
        let drivers = vec![Driver::new(k, 0.7), Driver::new(WaveIndex::new([0, 0, 1]).unwrap(), 0.2)];
        let g = match family {
            0 => NoiseFamily::Additive { drivers },
            1 => NoiseFamily::DiagonalSpectral { drivers },
            _ => NoiseFamily::LinearMultiplicative { sigma: 0.4 },
        };
        let d = g.driver_dim();
        let u = random_field::<f64>(2, seed, 1.0).unwrap();
        let s = WienerStream::new(seed, 0);
        let w = s.increment::<f64>(0, 1.0, d).unwrap().values;
        let v = s.increment::<f64>(1, 1.0, d).unwrap().values;
        let mix: Vec<f64> = w.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = g.apply(&u, &mix).unwrap();
        let rhs = g.apply(&u, &w).unwrap().scale(a).axpy(b, &g.apply(&u, &v).unwrap()).unwrap();
        let scale = sobolev_norm_sq(&rhs, 0.0).sqrt().max(sobolev_norm_sq(&lhs, 0.0).sqrt());
        prop_assert!(sobolev_norm_sq(&lhs.sub(&rhs).unwrap(), 0.0).sqrt() <= 1e-14 * scale.max(1e-300));
        prop_assert!(lhs.divergence_defect() <= 1e-14 * scale.max(1e-300) * 4.0);
    }

    #[test]
    fn growth_ratios_respect_closed_form(seed in any::<u64>(), scale in 0.01f64..1e3, family in 0usize..3) {
        let drivers = decay_drivers::<f64>(2, 0.6, 1.0, 5).unwrap();
        let g = match family {
            0 => NoiseFamily::Additive { drivers },
            1 => NoiseFamily::DiagonalSpectral { drivers },
            _ => NoiseFamily::LinearMultiplicative { sigma: 0.6 },
        };
        let (c0, c1, _) = g.closed_form_constants();
        let u = random_field::<f64>(2, seed, 1.0).unwrap().scale(scale);
        prop_assert!(g.hs_norm_sq(&u, 0.0) / (1.0 + sobolev_norm_sq(&u, 0.0)) <= c0 * (1.0 + 1e-12));
        prop_assert!(g.hs_norm_sq(&u, 1.0) / (1.0 + sobolev_norm_sq(&u, 1.0)) <= c1 * (1.0 + 1e-12));
    }
}
