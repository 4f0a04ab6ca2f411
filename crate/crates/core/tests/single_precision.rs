use leray_core::diagnostics::{energy_ledger, LedgerNorm};
use leray_core::integrator::{linear_decay_factor, run_trajectory, InitialCondition, RunConfig};
use leray_core::noise::NoiseFamily;
use leray_core::nonlinear::leray_nonlinearity;
use leray_core::spectral::{random_field, sobolev_norm};
use leray_core::{ModelContext, ModelContext32, SpectralField32, WaveIndex};

#[test]
fn cancellation_holds_in_single_precision() {
    let ctx = ModelContext32::with_params(1.0, 1.0, 1.0, 1.0, 6).unwrap();
    for seed in 0..5 {
        let u: SpectralField32 = random_field(6, seed, 1.0).unwrap();
        let b = leray_nonlinearity(&u, &ctx).unwrap();
        let scale = sobolev_norm(&b, 0.0) * sobolev_norm(&u, 0.0);
        assert!(b.inner(&u).unwrap().abs() <= 1e-5 * scale);
    }
}

#[test]
fn single_precision_tracks_double() {
    let mode = WaveIndex::new([1, 0, 0]).unwrap();
    let ctx = ModelContext32::with_params(1.0, 1.0, 1.0, 1.0, 2).unwrap();
    let mut cfg = RunConfig::new(ctx.clone(), 1e-2f32, 1.0);
    cfg.initial = InitialCondition::SingleMode { mode, amplitude: 1.0 };
    let last = run_trajectory(&cfg).unwrap().samples.last().unwrap().norm_l2;
    let exact = linear_decay_factor(&ctx, mode, 1.0);
    assert!((last - exact).abs() / exact < 1e-2);

    let ctx64 = ModelContext::with_params(0.5, 1.0, 1.0, 1.0, 4).unwrap();
    let mut cfg64 = RunConfig::new(ctx64, 0.02, 0.2);
    cfg64.noise = NoiseFamily::LinearMultiplicative { sigma: 0.2 };
    cfg64.initial = InitialCondition::Random {
        seed: 3,
        slope: 2.0,
        amplitude: 1.0,
    };
    let ctx32 = ModelContext32::with_params(0.5, 1.0, 1.0, 1.0, 4).unwrap();
    let mut cfg32 = RunConfig::new(ctx32, 0.02f32, 0.2);
    cfg32.noise = NoiseFamily::LinearMultiplicative { sigma: 0.2 };
    cfg32.initial = InitialCondition::Random {
        seed: 3,
        slope: 2.0,
        amplitude: 1.0,
    };
    let a = run_trajectory(&cfg64).unwrap();
    let b = run_trajectory(&cfg32).unwrap();
    assert!(b.is_complete() && !energy_ledger(&b, LedgerNorm::H1).is_empty());
    for (x, y) in a.samples.iter().zip(&b.samples) {
        assert!((x.norm_h1 - y.norm_h1 as f64).abs() <= 1e-4 * x.norm_h1);
    }
}
