//! Seeded Monte Carlo engine: sweeps across the test budget, standalone
//! experiments, the brute-force oracle suite, and CSV/JSON output.
//!
//! Every trial draws its randomness from
//! [`trial_rng(master_seed, cell_id, trial_id)`](crate::rng::trial_rng), so
//! results do not depend on scheduling or on the order in which cells run.

mod config;
mod experiments;
mod oracle;
mod report;
mod sweep;

pub use config::{DecoderName, DetectorName, KSpec, SweepConfig};
pub use experiments::{
    run_dd_experiment, run_detect_experiment, run_witness_experiment, run_yprime_experiment, DdConfig, DdSummary,
    DetectConfig, DetectSummary, WitnessConfig, WitnessSummary, YPrimeConfig, YPrimeRow,
};
pub use oracle::{run_oracle_suite, OracleCheck, OracleLimits, OracleReport};
pub use report::{write_atomic, SCHEMA_LINE};
pub use sweep::{cell_id, replay_trial, run_sweep, write_sweep, CellSummary, PhaseCurve, SweepOutput, TrialRecord};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "GTAON_THREADS";

/// Worker pool sized by `GTAON_THREADS` when set to a positive integer, else rayon's default.
pub fn worker_pool() -> crate::Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let threads: usize =
            raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
                crate::Error::Config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))
            })?;
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(|e| crate::Error::Config(e.to_string()))
}
