//! Compare COMP, overlap ranking and exhaustive maximum likelihood on one
//! small instance as the number of tests grows.
//!
//! ```sh
//! cargo run --release --example decoders
//! ```

use gtaon::{
    apply_model, comp_candidates, decode_comp, decode_ml_exhaustive, decode_rank_overlap, gen_bernoulli, rng_from_seed,
    score, DefectiveSet, PopulationParams,
};

fn main() -> gtaon::Result<()> {
    let params = PopulationParams::new(60, 3)?;
    println!("p = 60, k = 3, k log2(p/k) = {:.1}, log2 C(p,k) = {:.1}", params.tests_scale(), params.log2_binomial());
    println!("{:>4} {:>11} {:>6} {:>6} {:>6}", "n", "candidates", "comp", "rank", "ml");
    for n in [5, 10, 15, 20, 30, 40] {
        let mut rng = rng_from_seed(n as u64);
        let s = DefectiveSet::sample(params, &mut rng);
        let x = gen_bernoulli(params, n, &mut rng)?;
        let y = apply_model(&x, &s)?;
        let overlap = |est| score(&s, &est, 0.0, 0.0).overlap;
        println!(
            "{n:>4} {:>11} {:>6} {:>6} {:>6}",
            comp_candidates(&x, &y).count_ones(),
            overlap(decode_comp(&x, &y, 3)?),
            overlap(decode_rank_overlap(&x, &y, 3)?),
            overlap(decode_ml_exhaustive(&x, &y, 3)?),
        );
    }
    println!("(columns after 'candidates' are overlaps |S ∩ Ŝ| out of 3)");
    Ok(())
}
