//! Seed derivation for reproducible trials.
//!
//! Every trial owns a private [`TrialRng`] (ChaCha with 8 rounds) seeded from
//! a 64-bit value derived by [`trial_seed`]. The derivation is a fixed chain
//! of SplitMix64 finalizers over `(master_seed, cell_id, trial_id)`, so the
//! stream a trial sees depends only on those three numbers and never on
//! which worker thread runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Per-trial generator used by every sampling routine in the crate.
pub type TrialRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function (Steele, Lea, Flood 2014).
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `seed = mix(mix(mix(master) ^ cell) ^ trial)`.
pub fn trial_seed(master_seed: u64, cell_id: u64, trial_id: u64) -> u64 {
    let a = splitmix64(master_seed);
    let b = splitmix64(a ^ cell_id.wrapping_mul(GOLDEN_GAMMA));
    splitmix64(b ^ trial_id)
}

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for `(master_seed, cell_id, trial_id)`.
pub fn trial_rng(master_seed: u64, cell_id: u64, trial_id: u64) -> TrialRng {
    rng_from_seed(trial_seed(master_seed, cell_id, trial_id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn splitmix_reference_values() {
        // First outputs of the reference SplitMix64 generator seeded with 0
        // (state advanced by the golden gamma before mixing).
        assert_eq!(splitmix64(0), 0xe220_a839_7b1d_cdaf);
        assert_eq!(splitmix64(GOLDEN_GAMMA), 0x6e78_9e6a_a1b9_65f4);
    }

    #[test]
    fn seeds_separate_cells_and_trials() {
        let s = trial_seed(1, 0, 0);
        assert_ne!(s, trial_seed(1, 0, 1));
        assert_ne!(s, trial_seed(1, 1, 0));
        assert_ne!(s, trial_seed(2, 0, 0));
        assert_eq!(s, trial_seed(1, 0, 0));
    }

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<u64> = (0..8)
            .map({
                let mut r = trial_rng(9, 3, 4);
                move |_| r.random()
            })
            .collect();
        let b: Vec<u64> = (0..8)
            .map({
                let mut r = trial_rng(9, 3, 4);
                move |_| r.random()
            })
            .collect();
        assert_eq!(a, b);
    }
}
