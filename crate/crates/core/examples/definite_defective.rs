//! Identify one defective with certainty using `c` repeated binary-splitting blocks.
//!
//! ```sh
//! cargo run --release --example definite_defective
//! ```

use gtaon::harness::{run_dd_experiment, DdConfig};
use gtaon::{build_saffron, decode_saffron, rng_from_seed, DefectiveSet, PopulationParams};

fn main() -> gtaon::Result<()> {
    let (p, k) = (10_000, 100);
    let mut rng = rng_from_seed(3);
    let s = DefectiveSet::sample(PopulationParams::new(p, k)?, &mut rng);
    let design = build_saffron(p, k, 3, &mut rng)?;
    let result = decode_saffron(&design, &design.outcomes(&s))?;
    println!(
        "{} tests, positives per block {:?}, identified {:?}",
        design.tests(),
        result.block_outcomes,
        result.identified
    );

    for c in 1..=4 {
        let summary = run_dd_experiment(&DdConfig { p, k, c, trials: 20_000, seed: 4 })?;
        println!(
            "c = {c}: {:>3} tests, P[NONE] = {:.4} vs (1 - 1/e)^c = {:.4}, false identifications {}",
            summary.tests,
            summary.none_rate,
            (1.0 - (-1f64).exp()).powi(c as i32),
            summary.false_identifications
        );
    }
    Ok(())
}
