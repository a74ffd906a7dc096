use std::fs;
use std::path::{Path, PathBuf};

use ppm_core::data::{default_target, GeneratorSpec, Marginal};
use ppm_core::geometry::Halfspace;
use ppm_core::learner::{Sampling, DEFAULT_BUDGET};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetConfig {
    pub normal: Vec<f64>,
    pub offset: f64,
}

fn gaussian() -> Marginal {
    Marginal::Gaussian
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub dim: usize,
    #[serde(default = "gaussian")]
    pub marginal: Marginal,
    /// Defaults to `x · 1/√d ≥ 0`.
    #[serde(default)]
    pub target: Option<TargetConfig>,
    #[serde(default)]
    pub label_noise: f64,
    #[serde(default)]
    pub privacy_flip: f64,
}

impl GeneratorConfig {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            marginal: Marginal::Gaussian,
            target: None,
            label_noise: 0.0,
            privacy_flip: 0.0,
        }
    }

    pub fn spec(&self, seed: u64) -> Result<GeneratorSpec> {
        let target = match &self.target {
            Some(t) => Halfspace::new(t.normal.clone(), t.offset)?,
            None => default_target(self.dim),
        };
        let spec = GeneratorSpec {
            dim: self.dim,
            marginal: self.marginal,
            target,
            label_noise: self.label_noise,
            privacy_flip: self.privacy_flip,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn default_trials() -> usize {
    20
}

fn default_holdout() -> usize {
    10_000
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET as u64
}

fn yes() -> bool {
    true
}

/// A grid of `(n, ε)` cells, each run for `trials` seeded trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub generator: GeneratorConfig,
    pub ns: Vec<usize>,
    pub epsilons: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_holdout")]
    pub holdout: usize,
    #[serde(default)]
    pub pool_cap: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub sampling: Sampling,
    /// Also record the ERM halfspace's mistakes.
    #[serde(default = "yes")]
    pub erm: bool,
    /// Excluded from the config hash.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(generator: GeneratorConfig, ns: Vec<usize>, epsilons: Vec<f64>) -> Self {
        Self {
            generator,
            ns,
            epsilons,
            trials: default_trials(),
            holdout: default_holdout(),
            pool_cap: None,
            seed: 0,
            budget: default_budget(),
            sampling: Sampling::Exact,
            erm: true,
            out: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let cfg: SweepConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() || self.epsilons.is_empty() {
            return Err(Error::Config("grid needs at least one n and one epsilon".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.ns.contains(&0) {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.holdout < 1000 {
            log::warn!("holdout size {} is below 1000; error estimates are coarse", self.holdout);
        }
        self.generator.spec(0)?;
        Ok(())
    }

    /// Hex SHA-256 prefix of the canonical JSON form, output path removed.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let json = serde_json::to_string(&c).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &n in &self.ns {
            for &epsilon in &self.epsilons {
                out.push(Cell {
                    index: out.len(),
                    n,
                    epsilon,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub n: usize,
    pub epsilon: f64,
}
