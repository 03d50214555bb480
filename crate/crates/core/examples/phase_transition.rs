//! Sweep the test budget across `k log2(p/k)` and write plot-ready CSV.
//!
//! ```sh
//! cargo run --release --example phase_transition -- sweep.csv
//! ```

use gtaon::harness::{run_sweep, DecoderName, SweepConfig};

fn main() -> gtaon::Result<()> {
    let mut config = SweepConfig::new(4096, 8, (2..=16).map(|b| b as f64 / 10.0).collect());
    config.decoder = DecoderName::RankOverlap;
    config.trials = 200;
    config.master_seed = 5;
    config.output = std::env::args().nth(1).map(Into::into);
    let out = run_sweep(&config)?;
    println!("{:>5} {:>4} {:>8} {:>8} {:>8}", "beta", "n", "exact", "weak", "overlap");
    for c in &out.curve.cells {
        println!("{:>5} {:>4} {:>8.3} {:>8.3} {:>8.2}", c.beta, c.n, c.exact.rate, c.weak.rate, c.mean_overlap);
    }
    if let Some(path) = &config.output {
        println!("wrote {}", path.display());
    }
    Ok(())
}
