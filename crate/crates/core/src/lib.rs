//! Non-adaptive group testing near the all-or-nothing threshold.
//!
//! The crate covers Bernoulli and auxiliary test designs, the noiseless OR
//! model, COMP / overlap-ranking / exhaustive decoders, weak-detection tests,
//! the exact chi-squared divergence between the planted and null laws with
//! its upper and lower bounds, a SAFFRON-style definite-defective scheme, and
//! a seeded Monte Carlo harness that sweeps the test budget across the
//! threshold `k log2(p/k)`.
//!
//! ```
//! use gtaon::{apply_model, decode_comp, gen_bernoulli, rng_from_seed, DefectiveSet, PopulationParams};
//!
//! let params = PopulationParams::new(1000, 5).unwrap();
//! let mut rng = rng_from_seed(7);
//! let s = DefectiveSet::sample(params, &mut rng);
//! let x = gen_bernoulli(params, 120, &mut rng).unwrap();
//! let y = apply_model(&x, &s).unwrap();
//! let estimate = decode_comp(&x, &y, 5).unwrap();
//! assert_eq!(estimate.len(), 5);
//! ```

pub mod bits;
pub mod comb;
pub mod dd;
pub mod decode;
pub mod design;
pub mod detect;
pub mod enumerate;
pub mod error;
pub mod harness;
pub mod rng;
pub mod stats;

pub use bits::{BitMatrix, BitVec};
pub use dd::{build_saffron, dd_negative_witness, decode_saffron, DdResult, SaffronBlock, SaffronDesign, Witness};
pub use decode::{
    comp_candidates, decode_comp, decode_ml_exhaustive, decode_rank_overlap, is_consistent, predict_extra_test, score,
    Estimate, RecoveryReport,
};
pub use design::{
    apply_model, gen_all_or_none, gen_bernoulli, gen_column_zeroed, sample_null, solve_nu, BernoulliParams,
    ColumnZeroedDesign, DefectiveSet, DesignKind, DesignSpec, Outcomes, PopulationParams,
};
pub use detect::{
    bayes_error_oracle, berry_esseen_binomial_tail, chi2_exact, chi2_lemma3_bound, chi2_lower_terms, detect_covered,
    detect_trivial, pair_consistency_prob, DetectVerdict, DivergenceReport, Hypothesis,
};
pub use error::{Error, Result};
pub use rng::{rng_from_seed, trial_rng, trial_seed};
pub use stats::{wilson_interval, Rate};
