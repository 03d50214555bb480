use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::design::{DesignKind, PopulationParams};
use crate::error::{Error, Result};

/// The defective count, either fixed or `ceil(p^theta)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KSpec {
    Count(usize),
    Power { theta: f64 },
}

impl KSpec {
    pub fn resolve(&self, p: usize) -> Result<usize> {
        match *self {
            KSpec::Count(k) => Ok(k),
            KSpec::Power { theta } if theta > 0.0 && theta < 1.0 => Ok((p as f64).powf(theta).ceil() as usize),
            KSpec::Power { theta } => Err(Error::Config(format!("k-rule exponent must lie in (0,1), got {theta}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderName {
    #[default]
    Comp,
    RankOverlap,
    MlExhaustive,
}

impl DecoderName {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderName::Comp => "comp",
            DecoderName::RankOverlap => "rank_overlap",
            DecoderName::MlExhaustive => "ml_exhaustive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorName {
    Trivial,
    Covered,
}

fn default_design() -> DesignKind {
    DesignKind::Bernoulli
}

fn default_trials() -> usize {
    500
}

fn default_alpha() -> f64 {
    0.1
}

fn default_delta() -> f64 {
    0.1
}

/// One sweep: a fixed `(p, k)` and a grid of test budgets
/// `n = round(beta k log2(p/k))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub p: usize,
    pub k: KSpec,
    pub betas: Vec<f64>,
    #[serde(default = "default_design")]
    pub design: DesignKind,
    #[serde(default)]
    pub decoder: DecoderName,
    #[serde(default)]
    pub detector: Option<DetectorName>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(p: usize, k: usize, betas: Vec<f64>) -> Self {
        Self {
            p,
            k: KSpec::Count(k),
            betas,
            design: default_design(),
            decoder: DecoderName::default(),
            detector: None,
            trials: default_trials(),
            master_seed: 0,
            alpha: default_alpha(),
            delta: default_delta(),
            output: None,
        }
    }

    /// Reads a TOML file, or JSON when the extension is `.json`.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: Self = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        };
        config.validate()?;
        Ok(config)
    }

    pub fn population(&self) -> Result<PopulationParams> {
        PopulationParams::new(self.p, self.k.resolve(self.p)?)
    }

    pub fn validate(&self) -> Result<()> {
        let population = self.population()?;
        self.design.validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.betas.is_empty() {
            return Err(Error::Config("beta grid is empty".into()));
        }
        if self.betas.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::Config("betas must be finite and non-negative".into()));
        }
        if self.betas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("betas must be strictly increasing".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) || !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::Config("alpha and delta must lie in [0,1]".into()));
        }
        match (self.detector, self.design) {
            (Some(DetectorName::Trivial), DesignKind::AllOrNone)
            | (Some(DetectorName::Covered), DesignKind::Bernoulli)
            | (None, _) => {}
            (Some(d), design) => {
                return Err(Error::Config(format!("detector {d:?} does not apply to design {}", design.label())))
            }
        }
        if let DesignKind::Saffron { .. } = self.design {
            if population.p < 2 * population.k {
                return Err(Error::Config("saffron design needs p >= 2k".into()));
            }
        }
        Ok(())
    }

    /// Test count of a cell.
    pub fn tests_for(&self, beta: f64) -> Result<usize> {
        Ok((beta * self.population()?.tests_scale()).round() as usize)
    }
}
