//! Configuration, persistence and orchestration behind the `leray` command line.

pub mod config;
pub mod ensemble;
pub mod invariants;
pub mod output;
pub mod snapshot;

pub use config::{load_config, parse_config, Settings};
pub use ensemble::run_ensemble;
pub use invariants::{run_invariant_suite, InvariantCheck};
pub use snapshot::{read_snapshot, write_snapshot, SnapshotMeta};
