//! Weak detection: the all-or-none design with its trivial test, and the
//! covered-column statistic on Bernoulli designs in a dense and a sparse regime.
//!
//! ```sh
//! cargo run --release --example weak_detection
//! ```

use gtaon::harness::{run_detect_experiment, DetectConfig, DetectorName};

fn main() -> gtaon::Result<()> {
    let trivial = run_detect_experiment(&DetectConfig {
        p: 100,
        k: 5,
        n: 10,
        detector: DetectorName::Trivial,
        trials_p: 10_000,
        trials_q: 100_000,
        seed: 1,
    })?;
    println!(
        "trivial, n = 10: errors under P {:.5}, under Q {:.5} (2^-10 = {:.5})",
        trivial.errors_under_p.rate,
        trivial.errors_under_q.rate,
        2f64.powi(-10)
    );

    let p = 20_000usize;
    for k in [8usize, 40, 200, 1000] {
        let n = (0.5 * k as f64 * (p as f64 / k as f64).log2()).floor() as usize;
        let s = run_detect_experiment(&DetectConfig {
            p,
            k,
            n,
            detector: DetectorName::Covered,
            trials_p: 200,
            trials_q: 200,
            seed: 2,
        })?;
        println!("covered, p = {p}, k = {k:>4}, n = {n:>5}: error rate {:.3}", s.error_rate);
    }
    Ok(())
}
