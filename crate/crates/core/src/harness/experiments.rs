use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::DetectorName;
use super::worker_pool;
use crate::dd::{build_saffron, dd_negative_witness, decode_saffron, Witness};
use crate::decode::{predict_extra_test, Estimate};
use crate::design::{
    apply_model, bernoulli_row, gen_all_or_none, gen_bernoulli, sample_null, solve_nu, DefectiveSet, DesignKind,
    DesignSpec, PopulationParams,
};
use crate::detect::{chi2_exact, detect_covered, detect_trivial, Hypothesis};
use crate::error::{invalid, Result};
use crate::rng::trial_rng;
use crate::stats::Rate;

/// Planted-overlap predictor experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YPrimeConfig {
    pub p: usize,
    pub k: usize,
    pub deltas: Vec<f64>,
    /// Fresh tests per overlap level.
    pub tests: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YPrimeRow {
    pub delta: f64,
    /// `floor(delta k) / k`.
    pub effective_delta: f64,
    pub success: Rate,
    /// `(1/2)^(1 - effective_delta)`.
    pub predicted: f64,
}

/// For each `delta`, plants an estimate sharing exactly `floor(delta k)` items
/// with the truth and measures how often it predicts a fresh Bernoulli test.
pub fn run_yprime_experiment(config: &YPrimeConfig) -> Result<Vec<YPrimeRow>> {
    let population = PopulationParams::new(config.p, config.k)?;
    if config.p < 2 * config.k {
        return Err(invalid("planting a disjoint estimate needs p >= 2k"));
    }
    let q = solve_nu(config.k)?.q;
    config
        .deltas
        .iter()
        .map(|&delta| {
            if !(0.0..=1.0).contains(&delta) {
                return Err(invalid(format!("delta must lie in [0,1], got {delta}")));
            }
            let shared = (delta * config.k as f64 + 1e-9).floor() as usize;
            let mut rng = trial_rng(config.seed, delta.to_bits(), 0);
            let s = DefectiveSet::sample(population, &mut rng);
            let outside: Vec<usize> = (0..config.p).filter(|j| !s.contains(*j)).collect();
            let mut planted: Vec<usize> = s.items()[..shared].to_vec();
            planted.extend(index::sample(&mut rng, outside.len(), config.k - shared).into_iter().map(|i| outside[i]));
            let estimate = Estimate::new(planted);
            let mut hits = 0u64;
            for _ in 0..config.tests {
                let row = bernoulli_row(config.p, q, &mut rng);
                let truth = s.items().iter().any(|&j| row.get(j));
                if predict_extra_test(&estimate, &row) == truth {
                    hits += 1;
                }
            }
            let effective_delta = shared as f64 / config.k as f64;
            Ok(YPrimeRow {
                delta,
                effective_delta,
                success: Rate::new(hits, config.tests as u64),
                predicted: (-(1.0 - effective_delta)).exp2(),
            })
        })
        .collect()
}

/// Paired planted/null detection experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectConfig {
    pub p: usize,
    pub k: usize,
    pub n: usize,
    pub detector: DetectorName,
    /// Samples from the planted law.
    pub trials_p: usize,
    /// Samples from the null law.
    pub trials_q: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectSummary {
    /// Planted samples declared null.
    pub errors_under_p: Rate,
    /// Null samples declared planted.
    pub errors_under_q: Rate,
    /// Average of the two error rates.
    pub error_rate: f64,
}

/// The trivial detector runs on the all-or-none design, the covered-column
/// detector on the Bernoulli design.
pub fn run_detect_experiment(config: &DetectConfig) -> Result<DetectSummary> {
    let population = PopulationParams::new(config.p, config.k)?;
    let kind = match config.detector {
        DetectorName::Trivial => DesignKind::AllOrNone,
        DetectorName::Covered => DesignKind::Bernoulli,
    };
    let spec = DesignSpec::new(kind, population, config.n)?;
    let decide = |x: &_, y: &_| match config.detector {
        DetectorName::Trivial => detect_trivial(x, y),
        DetectorName::Covered => detect_covered(x, y, config.k),
    };
    let pool = worker_pool()?;
    let (errors_p, errors_q) = pool.install(|| -> Result<(u64, u64)> {
        let errors_p = (0..config.trials_p as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(config.seed, 0, t);
                let s = DefectiveSet::sample(population, &mut rng);
                let x = match kind {
                    DesignKind::AllOrNone => gen_all_or_none(config.p, config.n, &mut rng),
                    _ => gen_bernoulli(population, config.n, &mut rng)?,
                };
                let y = apply_model(&x, &s)?;
                Ok(u64::from(decide(&x, &y)?.decided != Hypothesis::P))
            })
            .sum::<Result<u64>>()?;
        let errors_q = (0..config.trials_q as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(config.seed, 1, t);
                let (x, y) = sample_null(&spec, &mut rng)?;
                Ok(u64::from(decide(&x, &y)?.decided != Hypothesis::Q))
            })
            .sum::<Result<u64>>()?;
        Ok((errors_p, errors_q))
    })?;
    let errors_under_p = Rate::new(errors_p, config.trials_p as u64);
    let errors_under_q = Rate::new(errors_q, config.trials_q as u64);
    Ok(DetectSummary { errors_under_p, errors_under_q, error_rate: 0.5 * (errors_under_p.rate + errors_under_q.rate) })
}

/// Repeated definite-defective identification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DdConfig {
    pub p: usize,
    pub k: usize,
    pub c: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DdSummary {
    pub trials: usize,
    pub tests: usize,
    pub identified_rate: f64,
    pub none_rate: f64,
    pub none: Rate,
    pub false_identifications: u64,
    /// Blocks holding exactly one defective, over all blocks of all trials.
    pub single_defective_blocks: Rate,
}

pub fn run_dd_experiment(config: &DdConfig) -> Result<DdSummary> {
    let population = PopulationParams::new(config.p, config.k)?;
    let per_trial = |t: u64| -> Result<(bool, bool, u64, usize)> {
        let mut rng = trial_rng(config.seed, 0, t);
        let s = DefectiveSet::sample(population, &mut rng);
        let design = build_saffron(config.p, config.k, config.c, &mut rng)?;
        let result = decode_saffron(&design, &design.outcomes(&s))?;
        let singles = design
            .blocks
            .iter()
            .filter(|b| s.items().iter().filter(|j| b.subset.binary_search(j).is_ok()).count() == 1)
            .count() as u64;
        let false_id = result.identified.is_some_and(|i| !s.contains(i));
        Ok((result.identified.is_none(), false_id, singles, design.tests()))
    };
    let outcomes = worker_pool()?
        .install(|| (0..config.trials as u64).into_par_iter().map(per_trial).collect::<Result<Vec<_>>>())?;
    let none = outcomes.iter().filter(|o| o.0).count() as u64;
    let false_identifications = outcomes.iter().filter(|o| o.1).count() as u64;
    let singles: u64 = outcomes.iter().map(|o| o.2).sum();
    let trials = config.trials as u64;
    let none = Rate::new(none, trials);
    Ok(DdSummary {
        trials: config.trials,
        tests: outcomes.first().map_or(0, |o| o.3),
        identified_rate: 1.0 - none.rate,
        none_rate: none.rate,
        none,
        false_identifications,
        single_defective_blocks: Rate::new(singles, trials * config.c as u64),
    })
}

/// Frequency of a consistent `k`-set disjoint from the truth under the Bernoulli design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessConfig {
    pub p: usize,
    pub k: usize,
    pub n: usize,
    pub trials: usize,
    /// Subset budget per trial; see [`dd_negative_witness`].
    pub budget: u64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSummary {
    pub found: Rate,
    pub indeterminate: u64,
    pub chi2: f64,
    /// `1 / (1 + chi2)`.
    pub de_caen_bound: f64,
}

pub fn run_witness_experiment(config: &WitnessConfig) -> Result<WitnessSummary> {
    let population = PopulationParams::new(config.p, config.k)?;
    let chi2 = chi2_exact(config.p, config.k, config.n)?.chi2;
    let per_trial = |t: u64| -> Result<Witness> {
        let mut rng = trial_rng(config.seed, 0, t);
        let s = DefectiveSet::sample(population, &mut rng);
        let x = gen_bernoulli(population, config.n, &mut rng)?;
        let y = apply_model(&x, &s)?;
        dd_negative_witness(&x, &y, &s, config.budget, &mut rng)
    };
    let witnesses = worker_pool()?
        .install(|| (0..config.trials as u64).into_par_iter().map(per_trial).collect::<Result<Vec<_>>>())?;
    let found = witnesses.iter().filter(|w| **w == Witness::Found).count() as u64;
    let indeterminate = witnesses.iter().filter(|w| **w == Witness::Indeterminate).count() as u64;
    Ok(WitnessSummary {
        found: Rate::new(found, config.trials as u64),
        indeterminate,
        chi2,
        de_caen_bound: 1.0 / (1.0 + chi2),
    })
}
