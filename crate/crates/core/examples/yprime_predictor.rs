//! An estimate sharing a fraction `delta` of the defectives predicts a fresh
//! test with probability `2^(delta - 1)`.
//!
//! ```sh
//! cargo run --release --example yprime_predictor
//! ```

use gtaon::harness::{run_yprime_experiment, YPrimeConfig};

fn main() -> gtaon::Result<()> {
    let rows = run_yprime_experiment(&YPrimeConfig {
        p: 4096,
        k: 64,
        deltas: (0..=8).map(|d| d as f64 / 8.0).collect(),
        tests: 50_000,
        seed: 6,
    })?;
    for r in rows {
        println!(
            "delta = {:.3}: success {:.4} [{:.4}, {:.4}], predicted {:.4}",
            r.effective_delta, r.success.rate, r.success.ci_low, r.success.ci_high, r.predicted
        );
    }
    Ok(())
}
