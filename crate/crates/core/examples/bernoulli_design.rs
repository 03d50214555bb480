//! Draw a Bernoulli design, plant a defective set, and dump the matrix.
//!
//! ```sh
//! cargo run --example bernoulli_design
//! ```

use gtaon::design::{write_dump, DumpHeader};
use gtaon::{apply_model, gen_bernoulli, rng_from_seed, solve_nu, DefectiveSet, DesignKind, PopulationParams};

fn main() -> gtaon::Result<()> {
    let (p, k, n, seed) = (24, 3, 8, 2024);
    let params = PopulationParams::new(p, k)?;
    let nu = solve_nu(k)?;
    println!("k = {k}: nu = {:.6}, inclusion probability q = {:.6}", nu.nu, nu.q);
    println!("P[test negative] = (1 - q)^k = {:.6}", (1.0 - nu.q).powi(k as i32));

    let mut rng = rng_from_seed(seed);
    let s = DefectiveSet::sample(params, &mut rng);
    let x = gen_bernoulli(params, n, &mut rng)?;
    let y = apply_model(&x, &s)?;
    println!("defective set {:?}", s.items());
    for i in 0..n {
        let row: String = (0..p).map(|j| if x.get(i, j) { '1' } else { '.' }).collect();
        println!("{row}  -> {}", u8::from(y.get(i)));
    }

    println!("\nreplayable dump:");
    let header = DumpHeader { p, k, n, design: DesignKind::Bernoulli, seed };
    write_dump(std::io::stdout().lock(), &header, &x)?;
    Ok(())
}
