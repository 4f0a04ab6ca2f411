//! Strict TOML run configuration.
//!
//! ```toml
//! [model]
//! nu = 1.0
//! alpha = 1.0
//! theta1 = 1.0
//! theta2 = 1.0
//! n = 8
//! # nonlinear = true
//!
//! [time]
//! dt = 0.01
//! T = 1.0
//! # snapshot_every = 0.1        (default T/10)
//!
//! [noise]
//! family = "additive"           # none | additive | linear_multiplicative | diagonal_spectral
//! sigma = 0.1
//! driver_dim = 6                # decay law over the lowest shells ...
//! gamma = 1.0
//! # modes = [[1, 0, 0]]         # ... or an explicit mode list
//! # amplitudes = [0.1]          # with explicit amplitudes (otherwise sigma |k|^-gamma)
//! # seed = 0                    # master seed of the Wiener streams
//!
//! [initial]
//! kind = "random"               # zero | single_mode | random
//! seed = 1
//! slope = 2.0
//! amplitude = 1.0
//! # mode = [1, 0, 0]            (single_mode)
//!
//! [[monitors]]
//! kind = "tau_R"                # tau_R | rho_M | gamma_K
//! threshold = 100.0
//! # halt = false
//!
//! [cutoff]
//! R = 50.0
//!
//! [ensemble]
//! size = 16
//! workers = 4
//! # p = 2.0
//!
//! [output]
//! directory = "out"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::integrator::{InitialCondition, Monitor, RunConfig, StoppingKind};
use crate::noise::{decay_drivers, Driver, NoiseFamily};
use crate::spectral::{ModelContext, ModelParams, WaveIndex};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    model: ModelSection,
    time: TimeSection,
    #[serde(default)]
    noise: Option<NoiseSection>,
    #[serde(default)]
    initial: Option<InitialSection>,
    #[serde(default)]
    monitors: Vec<MonitorSection>,
    #[serde(default)]
    cutoff: Option<CutoffSection>,
    #[serde(default)]
    ensemble: Option<EnsembleSection>,
    #[serde(default)]
    output: Option<OutputSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    nu: f64,
    alpha: f64,
    theta1: f64,
    theta2: f64,
    n: usize,
    #[serde(default = "default_true")]
    nonlinear: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeSection {
    dt: f64,
    #[serde(rename = "T")]
    horizon: f64,
    snapshot_every: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseSection {
    family: String,
    sigma: Option<f64>,
    modes: Option<Vec<[i32; 3]>>,
    amplitudes: Option<Vec<f64>>,
    gamma: Option<f64>,
    driver_dim: Option<usize>,
    #[serde(default)]
    seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialSection {
    kind: String,
    seed: Option<u64>,
    slope: Option<f64>,
    amplitude: Option<f64>,
    mode: Option<[i32; 3]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MonitorSection {
    kind: String,
    threshold: f64,
    #[serde(default)]
    halt: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CutoffSection {
    #[serde(rename = "R")]
    r: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleSection {
    #[serde(default = "one")]
    size: usize,
    #[serde(default = "one")]
    workers: usize,
    #[serde(default = "two")]
    p: f64,
}

fn one() -> usize {
    1
}

fn two() -> f64 {
    2.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    directory: PathBuf,
}

/// A validated configuration document.
#[derive(Clone, Debug)]
pub struct Settings {
    pub run: RunConfig<f64>,
    pub ensemble_size: usize,
    pub workers: usize,
    pub moment_p: f64,
    pub output: Option<PathBuf>,
}

fn finite(key: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::config(key, "must be finite"))
    }
}

fn positive(key: &str, x: f64) -> Result<f64> {
    if finite(key, x)? > 0.0 {
        Ok(x)
    } else {
        Err(Error::config(key, "must be > 0"))
    }
}

fn required<T>(key: &str, x: Option<T>) -> Result<T> {
    x.ok_or_else(|| Error::config(key, "missing required key"))
}

fn forbid<T>(key: &str, x: &Option<T>, why: &str) -> Result<()> {
    match x {
        Some(_) => Err(Error::config(key, format!("not allowed {why}"))),
        None => Ok(()),
    }
}

fn wave(key: &str, k: [i32; 3], n: usize) -> Result<WaveIndex> {
    let w = WaveIndex::new(k).ok_or_else(|| Error::config(key, "the zero mode carries no energy"))?;
    if w.sup_norm() > n {
        return Err(Error::config(key, format!("{w} lies outside truncation {n}")));
    }
    Ok(w)
}

fn noise_family(sec: &NoiseSection, n: usize) -> Result<NoiseFamily<f64>> {
    let sigma = sec.sigma.map(|s| finite("noise.sigma", s)).transpose()?;
    if sigma.is_some_and(|s| s < 0.0) {
        return Err(Error::config("noise.sigma", "must be >= 0"));
    }
    let gamma = sec.gamma.map(|g| finite("noise.gamma", g)).transpose()?;
    match sec.family.as_str() {
        "none" => {
            let why = "for family \"none\"";
            forbid("noise.sigma", &sec.sigma, why)?;
            forbid("noise.modes", &sec.modes, why)?;
            forbid("noise.amplitudes", &sec.amplitudes, why)?;
            forbid("noise.gamma", &sec.gamma, why)?;
            forbid("noise.driver_dim", &sec.driver_dim, why)?;
            Ok(NoiseFamily::none())
        }
        "linear_multiplicative" => {
            let why = "for family \"linear_multiplicative\"";
            forbid("noise.modes", &sec.modes, why)?;
            forbid("noise.amplitudes", &sec.amplitudes, why)?;
            forbid("noise.gamma", &sec.gamma, why)?;
            forbid("noise.driver_dim", &sec.driver_dim, why)?;
            Ok(NoiseFamily::LinearMultiplicative {
                sigma: required("noise.sigma", sigma)?,
            })
        }
        kind @ ("additive" | "diagonal_spectral") => {
            let drivers = match &sec.modes {
                Some(modes) => {
                    forbid("noise.driver_dim", &sec.driver_dim, "together with noise.modes")?;
                    let waves = modes
                        .iter()
                        .map(|&k| wave("noise.modes", k, n))
                        .collect::<Result<Vec<_>>>()?;
                    match &sec.amplitudes {
                        Some(amps) => {
                            forbid("noise.sigma", &sec.sigma, "together with noise.amplitudes")?;
                            forbid("noise.gamma", &sec.gamma, "together with noise.amplitudes")?;
                            if amps.len() != waves.len() {
                                return Err(Error::config(
                                    "noise.amplitudes",
                                    format!("{} amplitudes for {} modes", amps.len(), waves.len()),
                                ));
                            }
                            waves
                                .iter()
                                .zip(amps)
                                .map(|(&k, &a)| {
                                    if finite("noise.amplitudes", a)? < 0.0 {
                                        return Err(Error::config("noise.amplitudes", "must be >= 0"));
                                    }
                                    Ok(Driver::new(k, a))
                                })
                                .collect::<Result<Vec<_>>>()?
                        }
                        None => {
                            let s = required("noise.sigma", sigma)?;
                            let g = gamma.unwrap_or(0.0);
                            waves
                                .iter()
                                .map(|&k| Driver::new(k, s * (k.norm_sq() as f64).powf(-g / 2.0)))
                                .collect()
                        }
                    }
                }
                None => {
                    forbid("noise.amplitudes", &sec.amplitudes, "without noise.modes")?;
                    let d = required("noise.driver_dim", sec.driver_dim)?;
                    let s = required("noise.sigma", sigma)?;
                    decay_drivers(n, s, gamma.unwrap_or(0.0), d)
                        .map_err(|e| Error::config("noise.driver_dim", e.to_string()))?
                }
            };
            Ok(if kind == "additive" {
                NoiseFamily::Additive { drivers }
            } else {
                NoiseFamily::DiagonalSpectral { drivers }
            })
        }
        other => Err(Error::config("noise.family", format!("unknown family \"{other}\""))),
    }
}

fn initial_condition(sec: &InitialSection, n: usize) -> Result<InitialCondition<f64>> {
    match sec.kind.as_str() {
        "zero" => {
            let why = "for kind \"zero\"";
            forbid("initial.seed", &sec.seed, why)?;
            forbid("initial.slope", &sec.slope, why)?;
            forbid("initial.amplitude", &sec.amplitude, why)?;
            forbid("initial.mode", &sec.mode, why)?;
            Ok(InitialCondition::Zero)
        }
        "single_mode" => {
            let why = "for kind \"single_mode\"";
            forbid("initial.seed", &sec.seed, why)?;
            forbid("initial.slope", &sec.slope, why)?;
            Ok(InitialCondition::SingleMode {
                mode: wave("initial.mode", required("initial.mode", sec.mode)?, n)?,
                amplitude: finite("initial.amplitude", required("initial.amplitude", sec.amplitude)?)?,
            })
        }
        "random" => {
            forbid("initial.mode", &sec.mode, "for kind \"random\"")?;
            Ok(InitialCondition::Random {
                seed: required("initial.seed", sec.seed)?,
                slope: finite("initial.slope", required("initial.slope", sec.slope)?)?,
                amplitude: finite("initial.amplitude", required("initial.amplitude", sec.amplitude)?)?,
            })
        }
        other => Err(Error::config("initial.kind", format!("unknown kind \"{other}\""))),
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<Settings> {
    let doc: Document = toml::from_str(text).map_err(|e| Error::config("document", e.message().to_string()))?;
    let m = &doc.model;
    let params = ModelParams {
        nu: positive("model.nu", m.nu)?,
        alpha: positive("model.alpha", m.alpha)?,
        theta1: finite("model.theta1", m.theta1)?,
        theta2: positive("model.theta2", m.theta2)?,
    };
    if params.theta1 < 0.0 {
        return Err(Error::config("model.theta1", "must be >= 0"));
    }
    if m.n == 0 {
        return Err(Error::config("model.n", "must be >= 1"));
    }
    let ctx = ModelContext::new(params, m.n).map_err(|e| Error::config("model", e.to_string()))?;

    let dt = positive("time.dt", doc.time.dt)?;
    let horizon = positive("time.T", doc.time.horizon)?;
    if dt >= horizon {
        return Err(Error::config("time.dt", "must be < T"));
    }
    let snapshot_every = match doc.time.snapshot_every {
        Some(s) => positive("time.snapshot_every", s)?,
        None => horizon / 10.0,
    };

    let mut run = RunConfig::new(ctx, dt, horizon);
    run.nonlinear = m.nonlinear;
    run.snapshot_every = Some(snapshot_every);
    if let Some(sec) = &doc.noise {
        run.noise = noise_family(sec, m.n)?;
        run.seed = sec.seed;
    }
    if let Some(sec) = &doc.initial {
        run.initial = initial_condition(sec, m.n)?;
    }
    run.monitors = doc
        .monitors
        .iter()
        .map(|s| {
            let kind = StoppingKind::parse(&s.kind)
                .ok_or_else(|| Error::config("monitors.kind", format!("unknown monitor \"{}\"", s.kind)))?;
            Ok(Monitor {
                kind,
                threshold: positive("monitors.threshold", s.threshold)?,
                halt: s.halt,
            })
        })
        .collect::<Result<_>>()?;
    if let Some(c) = &doc.cutoff {
        run.cutoff = Some(positive("cutoff.R", c.r)?);
    }
    run.validate().map_err(|e| Error::config("document", e.to_string()))?;

    let (ensemble_size, workers, moment_p) = match &doc.ensemble {
        Some(e) => (e.size, e.workers, e.p),
        None => (1, 1, 2.0),
    };
    if ensemble_size == 0 {
        return Err(Error::config("ensemble.size", "must be >= 1"));
    }
    if workers == 0 {
        return Err(Error::config("ensemble.workers", "must be >= 1"));
    }
    if !(finite("ensemble.p", moment_p)? >= 2.0) {
        return Err(Error::config("ensemble.p", "must be >= 2"));
    }
    Ok(Settings {
        run,
        ensemble_size,
        workers,
        moment_p,
        output: doc.output.map(|o| o.directory),
    })
}

pub fn load_config(path: &Path) -> Result<Settings> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}
