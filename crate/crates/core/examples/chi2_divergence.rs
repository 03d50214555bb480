//! Exact chi-squared divergence between the planted and null laws, with the
//! upper bound below `log2 C(p,k)` tests and the two-term lower bound above.
//!
//! ```sh
//! cargo run --example chi2_divergence
//! ```

use gtaon::chi2_exact;
use gtaon::comb::log2_binomial;
use gtaon::detect::{chi2_lower_terms, lemma3_log1p_bound};

fn main() -> gtaon::Result<()> {
    let (p, k) = (10_000usize, 22usize);
    let threshold = log2_binomial(p as u64, k as u64);
    println!("p = {p}, k = {k}, log2 C(p,k) = {threshold:.2}");
    println!("{:>6} {:>6} {:>14} {:>14} {:>14}", "eta", "n", "ln(1+chi2)", "upper", "lower");
    for eta in [0.9, 0.7, 0.5, 0.3, 0.1] {
        let below = ((1.0 - eta) * threshold).floor() as usize;
        let above = ((1.0 - eta) * threshold).ceil() as usize;
        let exact = chi2_exact(p, k, below)?;
        let upper = lemma3_log1p_bound(p, k, eta)?;
        let lower = chi2_lower_terms(p, k, above, eta)?;
        println!("{eta:>6} {below:>6} {:>14.4} {upper:>14.4} {:>14.4}", exact.log1p_chi2, lower.bound.ln_1p());
    }
    for n in [0, 50, 100, 150, 200] {
        let r = chi2_exact(p, k, n)?;
        println!("n = {n:>3}: chi2 = {:.6e}", r.chi2);
    }
    Ok(())
}
