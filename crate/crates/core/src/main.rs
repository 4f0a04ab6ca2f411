use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use leray_core::cli_io::output::{
    ledger_csv, regime_csv, summary_csv, trajectory_csv, write_file, write_incomplete_marker, INCOMPLETE_MARKER,
};
use leray_core::cli_io::{load_config, run_ensemble, run_invariant_suite, write_snapshot, Settings, SnapshotMeta};
use leray_core::diagnostics::{classify_regime, ensemble_moments};
use leray_core::integrator::{run_trajectory, RunConfig, TrajectoryRecord};
use leray_core::noise::audit_hypotheses;
use leray_core::Error;

const OUTPUT_ENV: &str = "LERAY_OUTPUT_DIR";
const DEFAULT_OUTPUT: &str = "leray-output";

const EXIT_OTHER: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_BLOWUP: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Parser)]
#[command(name = "leray", version, about = "Stochastic Leray-alpha model with fractional dissipation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Master seed of the Wiener streams (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config and LERAY_OUTPUT_DIR).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and write its time series, ledger and snapshots.
    Run(Common),
    /// Integrate an ensemble and write per-trajectory series and a moment summary.
    Ensemble {
        #[command(flatten)]
        common: Common,
        /// Worker threads (overrides the config).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Tabulate the well-posedness regime over a (theta1, theta2) grid.
    Classify {
        /// Comma-separated values or `start:stop:count`.
        #[arg(long, allow_hyphen_values = true)]
        theta1: String,
        /// Comma-separated values or `start:stop:count`.
        #[arg(long, allow_hyphen_values = true)]
        theta2: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Report empirical growth and Lipschitz constants of the configured noise.
    AuditNoise {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Run the operator, noise and integrator property suite on the configured model.
    CheckInvariants {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config { .. } | Error::InvalidParameter { .. } => EXIT_CONFIG,
            _ => EXIT_OTHER,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn output_dir(flag: Option<PathBuf>, config: Option<PathBuf>) -> PathBuf {
    flag.or(config)
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
}

fn prepare_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let marker = dir.join(INCOMPLETE_MARKER);
    if marker.exists() {
        std::fs::remove_file(&marker).map_err(|e| Error::Io { path: marker, source: e })?;
    }
    Ok(())
}

fn load(common: &Common) -> Result<Settings, Error> {
    let mut settings = load_config(&common.config)?;
    if let Some(seed) = common.seed {
        settings.run.seed = seed;
    }
    Ok(settings)
}

fn write_record(dir: &Path, prefix: &str, cfg: &RunConfig<f64>, record: &TrajectoryRecord<f64>) -> Result<(), Error> {
    write_file(&dir.join(format!("{prefix}.csv")), &trajectory_csv(record)?)?;
    write_file(&dir.join(format!("{prefix}_ledger.csv")), &ledger_csv(record)?)?;
    let p = cfg.ctx.params();
    for (i, snap) in record.snapshots.iter().enumerate() {
        let meta = SnapshotMeta {
            nu: p.nu,
            alpha: p.alpha,
            theta1: p.theta1,
            theta2: p.theta2,
            t: snap.t,
        };
        write_snapshot(&snap.field, &meta, &dir.join(format!("{prefix}_snap_{i:04}.lera")))?;
    }
    Ok(())
}

fn blowup_failure(records: &[&TrajectoryRecord<f64>]) -> Result<(), Failure> {
    let ids: Vec<String> = records.iter().filter(|r| r.blew_up()).map(|r| r.trajectory.to_string()).collect();
    if ids.is_empty() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_BLOWUP,
            message: format!("numerical blow-up in trajectories {}", ids.join(", ")),
        })
    }
}

fn cmd_run(common: Common) -> Result<(), Failure> {
    let settings = load(&common)?;
    let dir = output_dir(common.output, settings.output.clone());
    prepare_dir(&dir)?;
    let record = run_trajectory(&settings.run)?;
    write_record(&dir, "trajectory", &settings.run, &record)?;
    if write_incomplete_marker(&dir, &[&record])? {
        eprintln!("run halted early; see {}", dir.join(INCOMPLETE_MARKER).display());
    }
    let last = record.samples.last().expect("initial sample");
    println!(
        "t = {}  |u|_L2 = {}  |u|_H1 = {}  ({} steps, output in {})",
        last.t,
        last.norm_l2,
        last.norm_h1,
        record.terms.len(),
        dir.display()
    );
    blowup_failure(&[&record])
}

fn cmd_ensemble(common: Common, workers: Option<usize>) -> Result<(), Failure> {
    let settings = load(&common)?;
    let workers = workers.unwrap_or(settings.workers);
    if workers == 0 {
        return Err(Error::config("workers", "must be >= 1").into());
    }
    let dir = output_dir(common.output, settings.output.clone());
    prepare_dir(&dir)?;
    let cfg = &settings.run;
    let records = run_ensemble(cfg, settings.ensemble_size, workers, |mut r| {
        write_record(&dir, &format!("trajectory_{:04}", r.trajectory), cfg, &r)?;
        r.snapshots.clear();
        Ok(r)
    })?;
    let stats = ensemble_moments(&records, settings.moment_p)?;
    write_file(&dir.join("ensemble_summary.csv"), &summary_csv(&stats)?)?;
    let refs: Vec<&TrajectoryRecord<f64>> = records.iter().collect();
    if write_incomplete_marker(&dir, &refs)? {
        eprintln!("some trajectories halted early; see {}", dir.join(INCOMPLETE_MARKER).display());
    }
    println!(
        "{} trajectories; E|u(T)|^2 = {} +- {}; output in {}",
        stats.size,
        stats.final_energy.mean,
        stats.final_energy.se,
        dir.display()
    );
    if !stats.reliable {
        eprintln!("note: fewer than 8 trajectories, standard errors are not meaningful");
    }
    blowup_failure(&refs)
}

fn parse_axis(name: &str, spec: &str) -> Result<Vec<f64>, Error> {
    let bad = |why: &str| Error::config(name, format!("{why} in \"{spec}\""));
    let values: Vec<f64> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:count"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad("bad start"))?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad("bad stop"))?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad("bad count"))?;
        match count {
            0 => return Err(bad("count must be >= 1")),
            1 => vec![start],
            _ => (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect(),
        }
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad("bad number")))
            .collect::<Result<_, _>>()?
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(bad("non-finite value"));
    }
    Ok(values)
}

fn cmd_classify(theta1: &str, theta2: &str, output: Option<PathBuf>) -> Result<(), Failure> {
    let t1 = parse_axis("theta1", theta1)?;
    let t2 = parse_axis("theta2", theta2)?;
    let verdicts: Vec<_> = t1
        .iter()
        .flat_map(|&a| t2.iter().map(move |&b| classify_regime(a, b)))
        .collect();
    let table = regime_csv(&verdicts)?;
    let dir = output.or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from));
    if let Some(dir) = dir {
        prepare_dir(&dir)?;
        write_file(&dir.join("regimes.csv"), &table)?;
    }
    print!("{}", String::from_utf8_lossy(&table));
    Ok(())
}

fn cmd_audit(common: Common, samples: usize) -> Result<(), Failure> {
    let settings = load(&common)?;
    let noise = &settings.run.noise;
    let report = audit_hypotheses(noise, settings.run.ctx.truncation(), samples, settings.run.seed)?;
    let (c0, c1, lip) = noise.closed_form_constants();
    println!("family: {} ({} drivers)", noise.name(), leray_core::noise::NoiseCoefficient::driver_dim(noise));
    println!("{report}");
    println!("closed-form growth_l2 {c0}, growth_h1 {c1}, lipschitz {lip}");
    Ok(())
}

fn cmd_invariants(common: Common, samples: usize) -> Result<(), Failure> {
    let settings = load(&common)?;
    let checks = run_invariant_suite(&settings.run.ctx, &settings.run.noise, samples, settings.run.seed)?;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(Failure {
            code: EXIT_INVARIANT,
            message: format!("{failed} of {} invariant checks failed", checks.len()),
        });
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(common) => cmd_run(common),
        Command::Ensemble { common, workers } => cmd_ensemble(common, workers),
        Command::Classify { theta1, theta2, output } => cmd_classify(&theta1, &theta2, output),
        Command::AuditNoise { common, samples } => cmd_audit(common, samples),
        Command::CheckInvariants { common, samples } => cmd_invariants(common, samples),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
