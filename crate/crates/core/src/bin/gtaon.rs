use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gtaon::comb::log2_binomial;
use gtaon::detect::{chi2_exact, chi2_lemma3_bound};
use gtaon::harness::{
    run_dd_experiment, run_detect_experiment, run_oracle_suite, run_sweep, run_yprime_experiment, DdConfig,
    DecoderName, DetectConfig, DetectorName, KSpec, OracleLimits, SweepConfig, YPrimeConfig,
};
use gtaon::DesignKind;

/// Group testing at the all-or-nothing threshold.
///
/// GTAON_THREADS caps the number of worker threads.
#[derive(Parser)]
#[command(name = "gtaon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Phase-transition sweep over test budgets beta * k log2(p/k).
    Sweep(SweepArgs),
    /// Exact chi-squared divergence between the planted and null laws.
    Chi2 {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, conflicts_with = "eta", required_unless_present = "eta")]
        n: Option<usize>,
        /// Derive n = floor((1 - eta) log2 C(p,k)) and report the matching upper bound.
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Paired planted/null runs of a weak-detection test.
    Detect {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "covered")]
        detector: DetectorArg,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Null samples; defaults to --trials.
        #[arg(long)]
        null_trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Definite-defective identification with c repeated blocks.
    Dd {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        c: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Brute-force and Monte Carlo oracles; exits with status 2 on any failure.
    Oracle {
        #[arg(long, default_value_t = 6)]
        max_p: usize,
        #[arg(long, default_value_t = 2)]
        max_k: usize,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        mc_samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Success of the planted-overlap predictor on fresh tests.
    Yprime {
        #[arg(long, default_value_t = 4096)]
        p: usize,
        #[arg(long, default_value_t = 64)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        tests: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// TOML or JSON sweep configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    design: Option<DesignArg>,
    /// Fraction of zeroed columns for the column-zeroed design.
    #[arg(long, default_value_t = 0.5)]
    alpha_prime: f64,
    /// Repetitions for the saffron design.
    #[arg(long, default_value_t = 1)]
    c: usize,
    #[arg(long, value_enum)]
    decoder: Option<DecoderArg>,
    #[arg(long, value_enum)]
    detector: Option<DetectorArg>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Cell CSV path; trial CSV and metadata are written alongside.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DesignArg {
    Bernoulli,
    ColumnZeroed,
    AllOrNone,
    Saffron,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Comp,
    RankOverlap,
    MlExhaustive,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorArg {
    Trivial,
    Covered,
}

impl From<DetectorArg> for DetectorName {
    fn from(d: DetectorArg) -> Self {
        match d {
            DetectorArg::Trivial => DetectorName::Trivial,
            DetectorArg::Covered => DetectorName::Covered,
        }
    }
}

fn sweep_config(args: SweepArgs) -> gtaon::Result<SweepConfig> {
    let mut config = match &args.config {
        Some(path) => SweepConfig::from_path(path)?,
        None => {
            let missing = |what| gtaon::Error::Config(format!("--{what} is required without --config"));
            SweepConfig::new(
                args.p.ok_or_else(|| missing("p"))?,
                args.k.ok_or_else(|| missing("k"))?,
                args.betas.clone().ok_or_else(|| missing("betas"))?,
            )
        }
    };
    if let Some(p) = args.p {
        config.p = p;
    }
    if let Some(k) = args.k {
        config.k = KSpec::Count(k);
    }
    if let Some(betas) = args.betas {
        config.betas = betas;
    }
    if let Some(design) = args.design {
        config.design = match design {
            DesignArg::Bernoulli => DesignKind::Bernoulli,
            DesignArg::ColumnZeroed => DesignKind::ColumnZeroed { alpha_prime: args.alpha_prime },
            DesignArg::AllOrNone => DesignKind::AllOrNone,
            DesignArg::Saffron => DesignKind::Saffron { c: args.c },
        };
    }
    if let Some(decoder) = args.decoder {
        config.decoder = match decoder {
            DecoderArg::Comp => DecoderName::Comp,
            DecoderArg::RankOverlap => DecoderName::RankOverlap,
            DecoderArg::MlExhaustive => DecoderName::MlExhaustive,
        };
    }
    if let Some(detector) = args.detector {
        config.detector = Some(detector.into());
    }
    config.trials = args.trials.unwrap_or(config.trials);
    config.master_seed = args.seed.unwrap_or(config.master_seed);
    config.alpha = args.alpha.unwrap_or(config.alpha);
    config.delta = args.delta.unwrap_or(config.delta);
    if args.output.is_some() {
        config.output = args.output;
    }
    config.validate()?;
    Ok(config)
}

enum Failure {
    Usage(String),
    Oracle,
}

impl From<gtaon::Error> for Failure {
    fn from(e: gtaon::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn print(value: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&value).expect("json values serialize"));
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Sweep(args) => {
            let config = sweep_config(args)?;
            let output = run_sweep(&config)?;
            print(serde_json::to_value(&output.curve).map_err(gtaon::Error::from)?);
        }
        Command::Chi2 { p, k, n, eta } => {
            let n = match (n, eta) {
                (Some(n), _) => n,
                (None, Some(eta)) => ((1.0 - eta) * log2_binomial(p as u64, k as u64)).floor().max(0.0) as usize,
                (None, None) => unreachable!("clap requires --n or --eta"),
            };
            let report = chi2_exact(p, k, n)?;
            let lemma3_bound = eta.map(|eta| chi2_lemma3_bound(p, k, eta)).transpose()?;
            print(json!({
                "p": p,
                "k": k,
                "n": n,
                "chi2": report.chi2,
                "log1p_chi2": report.log1p_chi2,
                "lemma3_bound": lemma3_bound,
            }));
        }
        Command::Detect { p, k, n, detector, trials, null_trials, seed } => {
            let config = DetectConfig {
                p,
                k,
                n,
                detector: detector.into(),
                trials_p: trials,
                trials_q: null_trials.unwrap_or(trials),
                seed,
            };
            print(serde_json::to_value(run_detect_experiment(&config)?).map_err(gtaon::Error::from)?);
        }
        Command::Dd { p, k, c, trials, seed } => {
            let s = run_dd_experiment(&DdConfig { p, k, c, trials, seed })?;
            print(json!({
                "trials": s.trials,
                "tests": s.tests,
                "identified_rate": s.identified_rate,
                "none_rate": s.none_rate,
                "false_identifications": s.false_identifications,
            }));
        }
        Command::Oracle { max_p, max_k, max_n, mc_samples, seed } => {
            let report = run_oracle_suite(OracleLimits { max_p, max_k, max_n, mc_samples, seed })?;
            print(serde_json::to_value(&report).map_err(gtaon::Error::from)?);
            if !report.passed() {
                for failure in report.failures() {
                    eprintln!(
                        "oracle failed: {} (observed {}, tolerance {})",
                        failure.name, failure.observed, failure.tolerance
                    );
                }
                return Err(Failure::Oracle);
            }
        }
        Command::Yprime { p, k, deltas, tests, seed } => {
            let rows = run_yprime_experiment(&YPrimeConfig { p, k, deltas, tests, seed })?;
            print(serde_json::to_value(rows).map_err(gtaon::Error::from)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Oracle) => ExitCode::from(2),
    }
}
