use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{DecoderName, DetectorName, SweepConfig};
use super::report::{csv_body, write_atomic, SCHEMA_LINE};
use super::worker_pool;
use crate::bits::BitMatrix;
use crate::dd::{build_saffron, decode_saffron, DdResult};
use crate::decode::{decode_comp, decode_ml_exhaustive, decode_rank_overlap, score, Estimate, RecoveryReport};
use crate::design::{
    apply_model, gen_all_or_none, gen_bernoulli, gen_column_zeroed, sample_null, DefectiveSet, DesignKind, DesignSpec,
    Outcomes, PopulationParams,
};
use crate::detect::{detect_covered, detect_trivial, DetectVerdict, Hypothesis};
use crate::error::Result;
use crate::rng::{rng_from_seed, trial_seed, TrialRng};
use crate::stats::Rate;

/// One Monte Carlo trial.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub beta: f64,
    pub n: usize,
    pub trial: u64,
    pub seed: u64,
    pub report: RecoveryReport,
    /// Overlap of the survivor-restricted estimate before padding (column-zeroed design only).
    pub pre_pad_overlap: Option<usize>,
    pub detect_p: Option<DetectVerdict>,
    pub detect_q: Option<DetectVerdict>,
    pub dd: Option<DdResult>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl PartialEq for TrialRecord {
    /// Equality ignores `wall_time`.
    fn eq(&self, other: &Self) -> bool {
        self.beta.to_bits() == other.beta.to_bits()
            && self.n == other.n
            && self.trial == other.trial
            && self.seed == other.seed
            && self.report == other.report
            && self.pre_pad_overlap == other.pre_pad_overlap
            && self.detect_p == other.detect_p
            && self.detect_q == other.detect_q
            && self.dd == other.dd
    }
}

/// Aggregates of one `beta` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub beta: f64,
    pub n: usize,
    /// `k log2(p/k)`.
    pub tests_scale: f64,
    /// `log2 C(p,k)`.
    pub log2_binomial: f64,
    pub trials: usize,
    pub exact: Rate,
    pub alpha_approx: Rate,
    pub weak: Rate,
    /// Fraction of correct decisions over the paired planted and null samples.
    pub detect: Option<Rate>,
    pub dd_identified: Option<Rate>,
    pub mean_overlap: f64,
}

/// Success rates against the test budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseCurve {
    pub p: usize,
    pub k: usize,
    pub design: String,
    pub decoder: DecoderName,
    pub alpha: f64,
    pub delta: f64,
    pub cells: Vec<CellSummary>,
}

#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub curve: PhaseCurve,
    /// Cell-major, trial-minor.
    pub trials: Vec<TrialRecord>,
    /// Summed trial wall time per cell.
    pub cell_wall_times: Vec<Duration>,
}

/// Seed-derivation id of a cell; depends only on `beta`, so reordering cells changes nothing.
pub fn cell_id(beta: f64) -> u64 {
    beta.to_bits()
}

fn decode_with(decoder: DecoderName, x: &BitMatrix, y: &Outcomes, k: usize) -> Result<Estimate> {
    match decoder {
        DecoderName::Comp => decode_comp(x, y, k),
        DecoderName::RankOverlap => decode_rank_overlap(x, y, k),
        DecoderName::MlExhaustive => decode_ml_exhaustive(x, y, k),
    }
}

fn pad_to(mut items: Vec<usize>, k: usize, p: usize) -> Estimate {
    let chosen = items.clone();
    items.extend((0..p).filter(|j| !chosen.contains(j)).take(k.saturating_sub(chosen.len())));
    Estimate::new(items)
}

fn detect_with(detector: DetectorName, x: &BitMatrix, y: &Outcomes, k: usize) -> Result<DetectVerdict> {
    match detector {
        DetectorName::Trivial => detect_trivial(x, y),
        DetectorName::Covered => detect_covered(x, y, k),
    }
}

struct Planted {
    x: Option<BitMatrix>,
    y: Outcomes,
    estimate: Estimate,
    pre_pad_overlap: Option<usize>,
    dd: Option<DdResult>,
}

fn plant_and_decode(
    config: &SweepConfig,
    population: PopulationParams,
    s: &DefectiveSet,
    n: usize,
    rng: &mut TrialRng,
) -> Result<Planted> {
    let k = population.k;
    Ok(match config.design {
        DesignKind::Bernoulli | DesignKind::AllOrNone => {
            let x = if config.design == DesignKind::Bernoulli {
                gen_bernoulli(population, n, rng)?
            } else {
                gen_all_or_none(population.p, n, rng)
            };
            let y = apply_model(&x, s)?;
            let estimate = decode_with(config.decoder, &x, &y, k)?;
            Planted { x: Some(x), y, estimate, pre_pad_overlap: None, dd: None }
        }
        DesignKind::ColumnZeroed { alpha_prime } => {
            let cz = gen_column_zeroed(population, n, alpha_prime, rng)?;
            let y = apply_model(&cz.matrix, s)?;
            let restricted = cz.matrix.select_columns(&cz.survivors);
            let local = decode_with(config.decoder, &restricted, &y, cz.k_bar.min(cz.survivors.len()))?;
            let global: Vec<usize> = local.items().iter().map(|&i| cz.survivors[i]).collect();
            let pre = global.iter().filter(|&&j| s.contains(j)).count();
            Planted {
                x: Some(cz.matrix),
                y,
                estimate: pad_to(global, k, population.p),
                pre_pad_overlap: Some(pre),
                dd: None,
            }
        }
        DesignKind::Saffron { c } => {
            let design = build_saffron(population.p, k, c, rng)?;
            let y = design.outcomes(s);
            let dd = decode_saffron(&design, &y)?;
            let estimate = Estimate::new(dd.identified.into_iter().collect());
            Planted { x: None, y, estimate, pre_pad_overlap: None, dd: Some(dd) }
        }
    })
}

fn run_trial(config: &SweepConfig, population: PopulationParams, beta: f64, trial: u64) -> Result<TrialRecord> {
    let start = Instant::now();
    let seed = trial_seed(config.master_seed, cell_id(beta), trial);
    let mut rng = rng_from_seed(seed);
    let n = config.tests_for(beta)?;
    let s = DefectiveSet::sample(population, &mut rng);
    let planted = plant_and_decode(config, population, &s, n, &mut rng)?;
    let report = score(&s, &planted.estimate, config.alpha, config.delta);
    let (detect_p, detect_q) = match (config.detector, &planted.x) {
        (Some(detector), Some(x)) => {
            let on_p = detect_with(detector, x, &planted.y, population.k)?;
            let spec = DesignSpec::new(config.design, population, n)?;
            let (x0, y0) = sample_null(&spec, &mut rng)?;
            let on_q = detect_with(detector, &x0, &y0, population.k)?;
            (Some(on_p), Some(on_q))
        }
        _ => (None, None),
    };
    Ok(TrialRecord {
        beta,
        n: planted.y.len(),
        trial,
        seed,
        report,
        pre_pad_overlap: planted.pre_pad_overlap,
        detect_p,
        detect_q,
        dd: planted.dd,
        wall_time: start.elapsed(),
    })
}

/// Regenerates a single trial from the configuration alone.
pub fn replay_trial(config: &SweepConfig, beta: f64, trial: u64) -> Result<TrialRecord> {
    config.validate()?;
    run_trial(config, config.population()?, beta, trial)
}

fn summarize(config: &SweepConfig, population: PopulationParams, beta: f64, records: &[TrialRecord]) -> CellSummary {
    let trials = records.len() as u64;
    let count = |f: &dyn Fn(&TrialRecord) -> bool| records.iter().filter(|r| f(r)).count() as u64;
    let detect = config.detector.map(|_| {
        let correct = count(&|r| r.detect_p.is_some_and(|v| v.decided == Hypothesis::P))
            + count(&|r| r.detect_q.is_some_and(|v| v.decided == Hypothesis::Q));
        Rate::new(correct, 2 * trials)
    });
    let dd_identified = matches!(config.design, DesignKind::Saffron { .. })
        .then(|| Rate::new(count(&|r| r.dd.as_ref().is_some_and(|d| d.identified.is_some())), trials));
    CellSummary {
        beta,
        n: records.first().map_or(0, |r| r.n),
        tests_scale: population.tests_scale(),
        log2_binomial: population.log2_binomial(),
        trials: records.len(),
        exact: Rate::new(count(&|r| r.report.exact), trials),
        alpha_approx: Rate::new(count(&|r| r.report.alpha_approx), trials),
        weak: Rate::new(count(&|r| r.report.weak), trials),
        detect,
        dd_identified,
        mean_overlap: records.iter().map(|r| r.report.overlap as f64).sum::<f64>() / trials.max(1) as f64,
    }
}

/// Runs every `(beta, trial)` pair on the worker pool and aggregates per cell.
///
/// When `config.output` is set, the cell CSV, the per-trial CSV and the
/// metadata JSON are written next to each other (see [`write_sweep`]).
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    config.validate()?;
    let population = config.population()?;
    let trials = config.trials as u64;
    let jobs: Vec<(f64, u64)> = config.betas.iter().flat_map(|&b| (0..trials).map(move |t| (b, t))).collect();
    let records: Vec<TrialRecord> = worker_pool()?.install(|| {
        jobs.par_iter().map(|&(beta, t)| run_trial(config, population, beta, t)).collect::<Result<Vec<_>>>()
    })?;
    let mut cells = Vec::with_capacity(config.betas.len());
    let mut cell_wall_times = Vec::with_capacity(config.betas.len());
    for (chunk, &beta) in records.chunks(config.trials).zip(&config.betas) {
        cells.push(summarize(config, population, beta, chunk));
        cell_wall_times.push(chunk.iter().map(|r| r.wall_time).sum());
    }
    let output = SweepOutput {
        curve: PhaseCurve {
            p: population.p,
            k: population.k,
            design: config.design.label(),
            decoder: config.decoder,
            alpha: config.alpha,
            delta: config.delta,
            cells,
        },
        trials: records,
        cell_wall_times,
    };
    if let Some(path) = &config.output {
        write_sweep(&output, config, path)?;
    }
    Ok(output)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn rate_fields(rate: Option<Rate>) -> [String; 3] {
    match rate {
        Some(r) => [r.rate.to_string(), r.ci_low.to_string(), r.ci_high.to_string()],
        None => Default::default(),
    }
}

/// Writes `path` (one row per cell), `<stem>.trials.csv` (one row per trial)
/// and `<stem>.meta.json` (timestamps and wall times). Only the metadata
/// file varies between reruns with the same seed.
pub fn write_sweep(output: &SweepOutput, config: &SweepConfig, path: &Path) -> Result<()> {
    let curve = &output.curve;
    write_atomic(path, |w| {
        let mut csv = csv_body(w)?;
        let mut header: Vec<String> =
            ["p", "k", "design", "decoder", "beta", "n", "tests_scale", "log2_binomial", "trials"]
                .map(String::from)
                .into();
        for metric in ["exact", "alpha_approx", "weak", "detect", "dd_identified"] {
            for col in ["rate", "ci_low", "ci_high"] {
                header.push(format!("{metric}_{col}"));
            }
        }
        header.extend(["alpha", "delta", "mean_overlap"].map(String::from));
        csv.write_record(&header)?;
        for c in &curve.cells {
            let mut row = vec![
                curve.p.to_string(),
                curve.k.to_string(),
                curve.design.clone(),
                curve.decoder.name().to_string(),
                c.beta.to_string(),
                c.n.to_string(),
                c.tests_scale.to_string(),
                c.log2_binomial.to_string(),
                c.trials.to_string(),
            ];
            for rate in [Some(c.exact), Some(c.alpha_approx), Some(c.weak), c.detect, c.dd_identified] {
                row.extend(rate_fields(rate));
            }
            row.extend([curve.alpha.to_string(), curve.delta.to_string(), c.mean_overlap.to_string()]);
            csv.write_record(&row)?;
        }
        csv.flush()?;
        Ok(())
    })?;

    write_atomic(&sibling(path, "trials.csv"), |w| {
        let mut csv = csv_body(w)?;
        let mut header: Vec<&str> = vec!["beta", "n", "trial", "seed"];
        header.extend(RecoveryReport::CSV_HEADER);
        header.extend(["pre_pad_overlap", "detect_p", "detect_q", "dd_identified"]);
        csv.write_record(&header)?;
        let verdict = |v: Option<DetectVerdict>| opt(v.map(|v| if v.decided == Hypothesis::P { "P" } else { "Q" }));
        for r in &output.trials {
            let mut row = vec![r.beta.to_string(), r.n.to_string(), r.trial.to_string(), r.seed.to_string()];
            row.extend(r.report.csv_fields());
            row.extend([
                opt(r.pre_pad_overlap),
                verdict(r.detect_p),
                verdict(r.detect_q),
                opt(r.dd.as_ref().and_then(|d| d.identified)),
            ]);
            csv.write_record(&row)?;
        }
        csv.flush()?;
        Ok(())
    })?;

    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = serde_json::json!({
        "schema": SCHEMA_LINE.trim_start_matches('#'),
        "created_unix": created,
        "config": config,
        "cell_wall_seconds": output.cell_wall_times.iter().map(Duration::as_secs_f64).collect::<Vec<_>>(),
    });
    write_atomic(&sibling(path, "meta.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, &meta)?;
        Ok(())
    })
}
