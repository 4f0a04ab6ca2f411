//! Semi-implicit Euler–Maruyama time stepping of the Galerkin system, with optional
//! cutoff of the drift and noise and first-passage monitors.

use crate::error::{Error, Result};
use crate::noise::{apply_noise, NoiseCoefficient, NoiseFamily, WienerStream};
use crate::nonlinear::leray_nonlinearity;
use crate::scalar::Scalar;
use crate::spectral::{lambda_symbol, random_field, sobolev_norm, ModelContext, SpectralField, WaveIndex};

/// Smooth step: 1 on `[0, R]`, 0 on `[2R, ∞)`, built from `f(t) = exp(-1/t)` as
/// `f(1-t) / (f(1-t) + f(t))` with `t = (x-R)/R`.
pub fn cutoff_chi<T: Scalar>(x: T, r: T) -> T {
    if x <= r {
        return T::one();
    }
    if x >= r + r {
        return T::zero();
    }
    let t = (x - r) / r;
    let f = |s: T| if s > T::zero() { (-s.recip()).exp() } else { T::zero() };
    let a = f(T::one() - t);
    let b = f(t);
    a / (a + b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StoppingKind {
    /// `sup_{s≤t} ‖u‖₁ ≥ R`.
    TauR,
    /// `sup_{s≤t} ‖u‖₁² + ∫₀ᵗ ‖u‖²_{θ₂+1} ≥ M`.
    RhoM,
    /// `∫₀ᵗ ‖u‖²_{θ₂} ≥ K`.
    GammaK,
}

impl StoppingKind {
    pub fn name(self) -> &'static str {
        match self {
            StoppingKind::TauR => "tau_R",
            StoppingKind::RhoM => "rho_M",
            StoppingKind::GammaK => "gamma_K",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tau_R" => Some(StoppingKind::TauR),
            "rho_M" => Some(StoppingKind::RhoM),
            "gamma_K" => Some(StoppingKind::GammaK),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monitor<T> {
    pub kind: StoppingKind,
    pub threshold: T,
    /// Stop the trajectory at the first crossing instead of only recording it.
    pub halt: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StoppingRecord<T> {
    pub kind: StoppingKind,
    pub threshold: T,
    pub hit_time: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HaltReason<T> {
    Stopping(StoppingRecord<T>),
    /// A non-finite coefficient appeared in the step that would have reached `t`.
    NumericalBlowup { t: T, step: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition<T> {
    Zero,
    /// Real mode `e cos(k·x)·√2·amplitude`, `e` a unit vector orthogonal to `k`, so
    /// `‖u₀‖_{L²} = amplitude`.
    SingleMode { mode: WaveIndex, amplitude: T },
    /// Random divergence-free field with `|û_k| ∝ |k|^{-slope}`, rescaled to `‖u₀‖_{L²} = amplitude`.
    Random { seed: u64, slope: T, amplitude: T },
}

impl<T: Scalar> InitialCondition<T> {
    pub fn build(&self, n: usize) -> Result<SpectralField<T>> {
        match self {
            InitialCondition::Zero => Ok(SpectralField::zeros(n)),
            InitialCondition::SingleMode { mode, amplitude } => {
                if mode.sup_norm() > n {
                    return Err(Error::invalid("mode", format!("{mode} lies outside truncation {n}")));
                }
                let family = NoiseFamily::Additive {
                    drivers: vec![crate::noise::Driver::new(*mode, *amplitude)],
                };
                family.apply(&SpectralField::zeros(n), &[T::one()])
            }
            InitialCondition::Random { seed, slope, amplitude } => {
                let u = random_field::<T>(n, *seed, *slope)?;
                let norm = sobolev_norm(&u, T::zero());
                Ok(u.scale(*amplitude / norm))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig<T: Scalar> {
    pub ctx: ModelContext<T>,
    pub dt: T,
    pub horizon: T,
    pub noise: NoiseFamily<T>,
    pub initial: InitialCondition<T>,
    /// `R` of the cutoff `χ_R(‖u‖₁)`; `None` runs the uncut system.
    pub cutoff: Option<T>,
    pub monitors: Vec<Monitor<T>>,
    /// Time between stored snapshots; `None` stores none.
    pub snapshot_every: Option<T>,
    pub nonlinear: bool,
    pub seed: u64,
    pub trajectory: u64,
}

impl<T: Scalar> RunConfig<T> {
    pub fn new(ctx: ModelContext<T>, dt: T, horizon: T) -> Self {
        RunConfig {
            ctx,
            dt,
            horizon,
            noise: NoiseFamily::none(),
            initial: InitialCondition::Zero,
            cutoff: None,
            monitors: Vec::new(),
            snapshot_every: None,
            nonlinear: true,
            seed: 0,
            trajectory: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: T| x.is_finite() && x > T::zero();
        if !positive(self.dt) {
            return Err(Error::invalid("dt", "must be finite and > 0"));
        }
        if !positive(self.horizon) || self.dt >= self.horizon {
            return Err(Error::invalid("T", "must be finite and > dt"));
        }
        if let Some(r) = self.cutoff {
            if !positive(r) {
                return Err(Error::invalid("R", "must be finite and > 0"));
            }
        }
        if let Some(s) = self.snapshot_every {
            if !positive(s) {
                return Err(Error::invalid("snapshot_every", "must be finite and > 0"));
            }
        }
        if self.monitors.iter().any(|m| !positive(m.threshold)) {
            return Err(Error::invalid("threshold", "must be finite and > 0"));
        }
        self.noise.validate(self.ctx.truncation())
    }

    /// Number of steps; `T/dt` is rounded when within round-off of an integer.
    pub fn steps(&self) -> u64 {
        let r = (self.horizon / self.dt).as_f64();
        let nearest = r.round();
        if (r - nearest).abs() <= 1e-9 * r.max(1.0) {
            nearest as u64
        } else {
            r.ceil() as u64
        }
    }

    /// Everything that distinguishes ensembles, excluding the trajectory id.
    pub fn signature(&self) -> String {
        format!(
            "{:?}|n={}|dt={}|T={}|{:?}|{:?}|{:?}|{:?}|nl={}|seed={}",
            self.ctx.params(),
            self.ctx.truncation(),
            self.dt,
            self.horizon,
            self.noise,
            self.initial,
            self.cutoff,
            self.monitors,
            self.nonlinear,
            self.seed
        )
    }

    pub fn initial_state(&self) -> Result<TrajectoryState<T>> {
        Ok(TrajectoryState {
            t: T::zero(),
            u: self.initial.build(self.ctx.truncation())?,
            step: 0,
            stream: WienerStream::new(self.seed, self.trajectory),
            halted: None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryState<T> {
    pub t: T,
    pub u: SpectralField<T>,
    pub step: u64,
    pub stream: WienerStream,
    pub halted: Option<HaltReason<T>>,
}

/// Per-step quantities needed to close the `L²` and `H¹` energy ledgers; index 0 is
/// `L²`, index 1 is `H¹`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepTerms<T> {
    pub chi: T,
    /// `χ²‖Λ^s g(uⁿ)‖²_HS Δt`.
    pub injection: [T; 2],
    /// `2χ⟨g(uⁿ)ΔW, Λ^{2s}uⁿ⟩`.
    pub martingale: [T; 2],
    /// `2χΔt⟨B(uⁿ), Λ^{2s}uⁿ⟩`.
    pub transfer: [T; 2],
}

/// Norms at one grid time, plus running integrals up to it.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Sample<T> {
    pub t: T,
    pub norm_l2: T,
    pub norm_h1: T,
    pub norm_theta2: T,
    pub norm_theta2p1: T,
    /// Trapezoidal `∫₀ᵗ ‖u‖²_{θ₂}`.
    pub int_diss_theta2: T,
    /// Trapezoidal `∫₀ᵗ ‖u‖²_{θ₂+1}`.
    pub int_diss_theta2p1: T,
    /// Cumulative `L²` injection `Σ χ²‖g‖²_HS Δt`.
    pub injection_cum: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot<T> {
    pub t: T,
    pub field: SpectralField<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord<T> {
    pub signature: String,
    pub trajectory: u64,
    pub nu: T,
    pub theta2: T,
    pub dt: T,
    /// One sample per accepted grid time, starting at `t = 0`.
    pub samples: Vec<Sample<T>>,
    /// `terms[i]` belongs to the step from `samples[i]` to `samples[i + 1]`.
    pub terms: Vec<StepTerms<T>>,
    pub monitors: Vec<Monitor<T>>,
    pub stopping: Vec<StoppingRecord<T>>,
    pub halt: Option<HaltReason<T>>,
    pub snapshots: Vec<Snapshot<T>>,
    pub final_state: SpectralField<T>,
}

impl<T: Scalar> TrajectoryRecord<T> {
    pub fn is_complete(&self) -> bool {
        self.halt.is_none()
    }

    pub fn blew_up(&self) -> bool {
        matches!(self.halt, Some(HaltReason::NumericalBlowup { .. }))
    }

    pub fn hit(&self, kind: StoppingKind) -> Option<&StoppingRecord<T>> {
        self.stopping.iter().find(|s| s.kind == kind)
    }
}

fn sample_of<T: Scalar>(u: &SpectralField<T>, t: T, theta2: T) -> Sample<T> {
    Sample {
        t,
        norm_l2: sobolev_norm(u, T::zero()),
        norm_h1: sobolev_norm(u, T::one()),
        norm_theta2: sobolev_norm(u, theta2),
        norm_theta2p1: sobolev_norm(u, theta2 + T::one()),
        ..Sample::default()
    }
}

/// One step `uⁿ → uⁿ⁺¹`:
///
/// ```text
/// ûⁿ⁺¹_k = [ûⁿ_k − Δt χ B̂(uⁿ)_k + χ (g(uⁿ)ΔW)^_k] / (1 + Δt ν|k|^{2θ₂})
/// ```
///
/// with `χ = χ_R(‖uⁿ‖₁)` under a cutoff and 1 otherwise. A non-finite result leaves `u`
/// unchanged and marks the state as halted.
pub fn step<T: Scalar>(state: &TrajectoryState<T>, cfg: &RunConfig<T>) -> Result<(TrajectoryState<T>, StepTerms<T>)> {
    if state.halted.is_some() {
        return Err(Error::invalid("state", "trajectory already halted"));
    }
    let ctx = &cfg.ctx;
    let dt = cfg.dt;
    let two = T::of(2.0);
    let u = &state.u;
    let chi = match cfg.cutoff {
        Some(r) => cutoff_chi(sobolev_norm(u, T::one()), r),
        None => T::one(),
    };
    let lap = u.apply_symbol(|i| T::of(ctx.lattice().norm_sq()[i] as f64));
    let mut terms = StepTerms {
        chi,
        ..StepTerms::default()
    };
    let mut rhs = u.clone();

    if cfg.nonlinear && chi > T::zero() {
        let b = leray_nonlinearity(u, ctx)?;
        terms.transfer = [two * dt * chi * b.inner(u)?, two * dt * chi * b.inner(&lap)?];
        rhs = rhs.axpy(-dt * chi, &b)?;
    }
    let dim = cfg.noise.driver_dim();
    if dim > 0 && chi > T::zero() {
        let incr = state.stream.increment(state.step, dt, dim)?;
        let xi = apply_noise(&cfg.noise, u, &incr)?;
        terms.martingale = [two * chi * xi.inner(u)?, two * chi * xi.inner(&lap)?];
        terms.injection = [
            chi * chi * cfg.noise.hs_norm_sq(u, T::zero()) * dt,
            chi * chi * cfg.noise.hs_norm_sq(u, T::one()) * dt,
        ];
        rhs = rhs.axpy(chi, &xi)?;
    }
    let nu_dt = ctx.nu() * dt;
    let diss = ctx.dissipation_symbol();
    let next = rhs.apply_symbol(|i| (T::one() + nu_dt * diss[i]).recip());

    let step_no = state.step + 1;
    let t = T::of(step_no as f64) * dt;
    let terms_finite = terms.injection.iter().chain(&terms.martingale).chain(&terms.transfer).all(|x| x.is_finite());
    if !next.is_finite() || !terms_finite {
        let mut halted = state.clone();
        halted.halted = Some(HaltReason::NumericalBlowup { t, step: step_no });
        return Ok((halted, StepTerms::default()));
    }
    Ok((
        TrajectoryState {
            t,
            u: next,
            step: step_no,
            stream: state.stream,
            halted: None,
        },
        terms,
    ))
}

/// Running value of a stopping functional over a sample series.
fn functional<T: Scalar>(kind: StoppingKind, sup_h1: T, s: &Sample<T>) -> T {
    match kind {
        StoppingKind::TauR => sup_h1,
        StoppingKind::RhoM => sup_h1 * sup_h1 + s.int_diss_theta2p1,
        StoppingKind::GammaK => s.int_diss_theta2,
    }
}

/// First grid time at which the functional of `kind` reaches `threshold`.
pub fn detect_stopping<T: Scalar>(samples: &[Sample<T>], kind: StoppingKind, threshold: T) -> Option<T> {
    let mut sup = T::zero();
    samples.iter().find_map(|s| {
        sup = sup.max(s.norm_h1);
        (functional(kind, sup, s) >= threshold).then_some(s.t)
    })
}

/// Integrates one path from `cfg.initial` to `cfg.horizon`.
pub fn run_trajectory<T: Scalar>(cfg: &RunConfig<T>) -> Result<TrajectoryRecord<T>> {
    cfg.validate()?;
    let theta2 = cfg.ctx.theta2();
    let half = T::of(0.5);
    let steps = cfg.steps();
    let snap_stride = cfg
        .snapshot_every
        .map(|s| ((s / cfg.dt).as_f64().round() as u64).max(1));

    let mut state = cfg.initial_state()?;
    let mut record = TrajectoryRecord {
        signature: cfg.signature(),
        trajectory: cfg.trajectory,
        nu: cfg.ctx.nu(),
        theta2,
        dt: cfg.dt,
        samples: Vec::with_capacity(steps as usize + 1),
        terms: Vec::with_capacity(steps as usize),
        monitors: cfg.monitors.clone(),
        stopping: Vec::new(),
        halt: None,
        snapshots: Vec::new(),
        final_state: state.u.clone(),
    };
    let mut sup_h1 = T::zero();
    let mut sample = sample_of(&state.u, T::zero(), theta2);

    loop {
        sup_h1 = sup_h1.max(sample.norm_h1);
        record.samples.push(sample);
        if snap_stride.is_some_and(|k| state.step % k == 0 || state.step == steps) {
            record.snapshots.push(Snapshot {
                t: state.t,
                field: state.u.clone(),
            });
        }
        for m in &cfg.monitors {
            let already = record.stopping.iter().any(|s| s.kind == m.kind && s.threshold == m.threshold);
            if !already && functional(m.kind, sup_h1, &sample) >= m.threshold {
                let hit = StoppingRecord {
                    kind: m.kind,
                    threshold: m.threshold,
                    hit_time: sample.t,
                };
                record.stopping.push(hit);
                if m.halt && record.halt.is_none() {
                    record.halt = Some(HaltReason::Stopping(hit));
                }
            }
        }
        if record.halt.is_some() || state.step == steps {
            break;
        }

        let prev = sample;
        let (next, terms) = step(&state, cfg)?;
        if let Some(h) = next.halted {
            record.halt = Some(h);
            break;
        }
        state = next;
        let dt = cfg.dt;
        sample = sample_of(&state.u, state.t, theta2);
        sample.int_diss_theta2 = prev.int_diss_theta2
            + half * dt * (prev.norm_theta2 * prev.norm_theta2 + sample.norm_theta2 * sample.norm_theta2);
        sample.int_diss_theta2p1 = prev.int_diss_theta2p1
            + half * dt * (prev.norm_theta2p1 * prev.norm_theta2p1 + sample.norm_theta2p1 * sample.norm_theta2p1);
        sample.injection_cum = prev.injection_cum + terms.injection[0];
        record.terms.push(terms);
    }
    record.final_state = state.u;
    Ok(record)
}

/// `e^{-ν|k|^{2θ₂}t}`: the exact decay factor of a single mode under the linear dynamics.
pub fn linear_decay_factor<T: Scalar>(ctx: &ModelContext<T>, k: WaveIndex, t: T) -> T {
    (-ctx.nu() * lambda_symbol(k.norm_sq(), ctx.theta2() + ctx.theta2()) * t).exp()
}
