//! Exact binomial tails against the Gaussian approximation and its
//! Berry-Esseen error radius.
//!
//! ```sh
//! cargo run --example berry_esseen
//! ```

use gtaon::berry_esseen_binomial_tail;
use gtaon::stats::binomial_upper_tail;

fn main() -> gtaon::Result<()> {
    println!("{:>7} {:>5} {:>6} {:>10} {:>10} {:>10}", "p", "q0", "lambda", "exact", "Q(lambda)", "radius");
    for (p, q0) in [(1_000usize, 0.5), (10_000, 0.1), (100_000, 0.9)] {
        for lambda in [-2.0, 0.0, 1.0, 2.5] {
            let be = berry_esseen_binomial_tail(p, q0, lambda)?;
            let cut = p as f64 * q0 + lambda * be.sigma * (p as f64).sqrt();
            let exact = binomial_upper_tail(p as u64, q0, cut.ceil() as u64);
            println!("{p:>7} {q0:>5} {lambda:>6} {exact:>10.6} {:>10.6} {:>10.6}", be.gaussian_value, be.error_radius);
        }
    }
    Ok(())
}
