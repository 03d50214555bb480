//! Run every brute-force and Monte Carlo oracle and print the report.
//!
//! ```sh
//! cargo run --release --example oracle_suite
//! ```

use gtaon::harness::{run_oracle_suite, OracleLimits};

fn main() -> gtaon::Result<()> {
    let report = run_oracle_suite(OracleLimits { mc_samples: 200_000, ..Default::default() })?;
    for c in &report.checks {
        println!(
            "{:<22} {} observed {:.3e} tolerance {:.1e}  {}",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.observed,
            c.tolerance,
            c.detail
        );
    }
    if !report.passed() {
        std::process::exit(2);
    }
    Ok(())
}
