//! Ensemble orchestration on a worker pool.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrator::{run_trajectory, RunConfig, TrajectoryRecord};
use crate::scalar::Scalar;

/// Runs trajectories `0..size` of `cfg` on `workers` threads.
///
/// Each trajectory draws from its own Wiener stream, so the records do not depend on the
/// worker count or on scheduling. `finish` is called on the worker that produced each
/// record (for per-trajectory output); results are returned in trajectory order.
pub fn run_ensemble<T, F>(cfg: &RunConfig<T>, size: usize, workers: usize, finish: F) -> Result<Vec<TrajectoryRecord<T>>>
where
    T: Scalar,
    F: Fn(TrajectoryRecord<T>) -> Result<TrajectoryRecord<T>> + Sync,
{
    if size == 0 {
        return Err(Error::EmptyEnsemble);
    }
    if workers == 0 {
        return Err(Error::invalid("workers", "must be >= 1"));
    }
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    pool.install(|| {
        (0..size as u64)
            .into_par_iter()
            .map(|id| {
                let mut member = cfg.clone();
                member.trajectory = id;
                finish(run_trajectory(&member)?)
            })
            .collect()
    })
}
