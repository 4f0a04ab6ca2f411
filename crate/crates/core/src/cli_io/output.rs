//! CSV time series, ensemble summaries and the incomplete-run marker.

use std::io::Write;
use std::path::Path;

use crate::diagnostics::{energy_ledger, EnsembleStats, LedgerNorm, RegimeVerdict};
use crate::error::{Error, Result};
use crate::integrator::{HaltReason, TrajectoryRecord};
use crate::scalar::Scalar;

/// Fixed leading columns of a trajectory time series; one `<kind>_<index>` hit flag per
/// monitor follows.
pub const TRAJECTORY_COLUMNS: [&str; 8] = [
    "t",
    "norm_L2",
    "norm_H1",
    "norm_Htheta2",
    "norm_Htheta2p1",
    "int_diss_theta2",
    "int_diss_theta2p1",
    "injection_cum",
];

pub const LEDGER_COLUMNS: [&str; 13] = [
    "t",
    "L2_kinetic",
    "L2_dissipation",
    "L2_injection",
    "L2_martingale",
    "L2_transfer",
    "L2_residual",
    "H1_kinetic",
    "H1_dissipation",
    "H1_injection",
    "H1_martingale",
    "H1_transfer",
    "H1_residual",
];

pub const INCOMPLETE_MARKER: &str = "INCOMPLETE";

/// Time series of a record as CSV text.
pub fn trajectory_csv<T: Scalar>(record: &TrajectoryRecord<T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = TRAJECTORY_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(record.monitors.iter().enumerate().map(|(i, m)| format!("{}_{i}", m.kind.name())));
    w.write_record(&header)?;
    for s in &record.samples {
        let mut row: Vec<String> = [
            s.t,
            s.norm_l2,
            s.norm_h1,
            s.norm_theta2,
            s.norm_theta2p1,
            s.int_diss_theta2,
            s.int_diss_theta2p1,
            s.injection_cum,
        ]
        .iter()
        .map(|x| x.to_string())
        .collect();
        for m in &record.monitors {
            let hit = record
                .stopping
                .iter()
                .any(|h| h.kind == m.kind && h.threshold == m.threshold && h.hit_time <= s.t);
            row.push(u8::from(hit).to_string());
        }
        w.write_record(&row)?;
    }
    into_bytes(w)
}

/// `L²` and `H¹` energy ledgers of a record as CSV text.
pub fn ledger_csv<T: Scalar>(record: &TrajectoryRecord<T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(LEDGER_COLUMNS)?;
    let l2 = energy_ledger(record, LedgerNorm::L2);
    let h1 = energy_ledger(record, LedgerNorm::H1);
    for (a, b) in l2.iter().zip(&h1) {
        let row = [
            a.t,
            a.kinetic,
            a.dissipation,
            a.injection,
            a.martingale,
            a.transfer,
            a.residual,
            b.kinetic,
            b.dissipation,
            b.injection,
            b.martingale,
            b.transfer,
            b.residual,
        ];
        w.write_record(row.iter().map(|x| x.to_string()))?;
    }
    into_bytes(w)
}

pub fn summary_csv<T: Scalar>(stats: &EnsembleStats<T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["statistic", "mean", "se"])?;
    let rows = [
        ("sup_norm_L2_pow_p", stats.sup_l2),
        ("sup_norm_H1_pow_p", stats.sup_h1),
        ("int_L2_pow_pm2_Htheta2", stats.int_theta2),
        ("int_H1_pow_pm2_Htheta2p1", stats.int_theta2p1),
        ("final_energy_L2", stats.final_energy),
    ];
    for (name, e) in rows {
        w.write_record([name.to_string(), e.mean.to_string(), e.se.to_string()])?;
    }
    w.write_record(["p".to_string(), stats.p.to_string(), String::new()])?;
    w.write_record(["size".to_string(), stats.size.to_string(), String::new()])?;
    w.write_record(["blowups".to_string(), stats.blowups.to_string(), String::new()])?;
    w.write_record(["reliable".to_string(), stats.reliable.to_string(), String::new()])?;
    into_bytes(w)
}

pub fn regime_csv<T: Scalar>(verdicts: &[RegimeVerdict<T>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["theta1", "theta2", "regime"])?;
    for v in verdicts {
        w.write_record([v.theta1.to_string(), v.theta2.to_string(), v.regime.name().to_string()])?;
    }
    into_bytes(w)
}

fn into_bytes(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).and_then(|_| f.flush()).map_err(|e| Error::io(path, e))
}

pub fn halt_description<T: Scalar>(halt: &HaltReason<T>) -> String {
    match halt {
        HaltReason::Stopping(s) => format!(
            "stopping time {} reached threshold {} at t = {}",
            s.kind.name(),
            s.threshold,
            s.hit_time
        ),
        HaltReason::NumericalBlowup { t, step } => {
            format!("non-finite state in step {step} (t = {t})")
        }
    }
}

/// Writes the `INCOMPLETE` marker listing every halted record; returns whether any halted.
pub fn write_incomplete_marker<T: Scalar>(dir: &Path, records: &[&TrajectoryRecord<T>]) -> Result<bool> {
    let lines: Vec<String> = records
        .iter()
        .filter_map(|r| r.halt.as_ref().map(|h| format!("trajectory {}: {}", r.trajectory, halt_description(h))))
        .collect();
    if lines.is_empty() {
        return Ok(false);
    }
    write_file(&dir.join(INCOMPLETE_MARKER), (lines.join("\n") + "\n").as_bytes())?;
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::classify_regime;
    use crate::integrator::{run_trajectory, InitialCondition, Monitor, RunConfig, StoppingKind};
    use crate::spectral::ModelContext;

    #[test]
    fn trajectory_columns_and_flags() {
        let ctx = ModelContext::with_params(1.0, 1.0, 1.0, 1.0, 2).unwrap();
        let mut cfg = RunConfig::new(ctx, 0.1, 0.3);
        cfg.initial = InitialCondition::Random {
            seed: 1,
            slope: 1.0,
            amplitude: 1.0,
        };
        cfg.monitors = vec![Monitor {
            kind: StoppingKind::GammaK,
            threshold: 1e-9,
            halt: false,
        }];
        let rec = run_trajectory(&cfg).unwrap();
        let text = String::from_utf8(trajectory_csv(&rec).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "t,norm_L2,norm_H1,norm_Htheta2,norm_Htheta2p1,int_diss_theta2,int_diss_theta2p1,injection_cum,gamma_K_0"
        );
        assert_eq!(lines.len(), 5);
        assert!(lines[1].ends_with(",0") && lines[2].ends_with(",1"));
        // floats are written in shortest round-trip form
        let t: f64 = lines[2].split(',').next().unwrap().parse().unwrap();
        assert_eq!(t, rec.samples[1].t);
    }

    #[test]
    fn regime_table() {
        let v = [classify_regime(0.0f64, 1.0), classify_regime(1.0, 1.0)];
        let text = String::from_utf8(regime_csv(&v).unwrap()).unwrap();
        assert_eq!(text, "theta1,theta2,regime\n0,1,local-only\n1,1,global-H0\n");
    }
}
