//! Exact output distributions of the private learner and an exact auditor
//! for neighboring datasets.
//!
//! Neighbors differ by replacing one private example. Because the class is
//! built from public examples only, both outputs range over the same
//! enumeration of `G` and can be compared pointwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::{check_epsilon, class_mistakes, enumerate_class, HalfspaceFamily};
use crate::model::{partition, PpmDataset};

/// Default ceiling on `|G|` for exact audits.
pub const AUDIT_BUDGET: u128 = 1_000_000;

/// Slack allowed on top of ε when comparing log-ratios.
pub const AUDIT_TOL: f64 = 1e-9;

/// Selection probabilities of the exponential mechanism over a finite
/// score list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismDistribution {
    pub mistakes: Vec<u32>,
    pub epsilon: f64,
    pub n: u64,
    pub log_probs: Vec<f64>,
}

impl MechanismDistribution {
    pub fn probs(&self) -> impl Iterator<Item = f64> + '_ {
        self.log_probs.iter().map(|l| l.exp())
    }
}

/// `log P(i) = (ε n / 2) q_i - lse_j((ε n / 2) q_j)` with `q_i = -mistakes_i / n`.
pub fn mechanism_distribution(mistakes: &[u32], epsilon: f64, n: u64) -> Result<MechanismDistribution> {
    if mistakes.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    let nf = n as f64;
    let exponent = |m: u32| epsilon * nf / 2.0 * (-(m as f64) / nf);
    let top = mistakes.iter().map(|&m| exponent(m)).fold(f64::NEG_INFINITY, f64::max);
    let lse = top + mistakes.iter().map(|&m| (exponent(m) - top).exp()).sum::<f64>().ln();
    Ok(MechanismDistribution {
        mistakes: mistakes.to_vec(),
        epsilon,
        n,
        log_probs: mistakes.iter().map(|&m| exponent(m) - lse).collect(),
    })
}

/// `max_i |log P(i) - log P'(i)|` over a shared index space.
pub fn max_log_ratio(p: &MechanismDistribution, q: &MechanismDistribution) -> f64 {
    if p.log_probs.len() != q.log_probs.len() {
        return f64::INFINITY;
    }
    p.log_probs
        .iter()
        .zip(&q.log_probs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditOptions {
    pub pool_cap: Option<usize>,
    /// Number of neighbor pairs.
    pub trials: usize,
    pub budget: u128,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            pool_cap: None,
            trials: 50,
            budget: AUDIT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairAudit {
    /// Dataset index of the replaced private entry.
    pub index: usize,
    pub max_log_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpAudit {
    pub epsilon: f64,
    pub class_size: u128,
    pub pairs: Vec<PairAudit>,
    pub max_log_ratio: f64,
}

impl DpAudit {
    pub fn passed(&self) -> bool {
        self.max_log_ratio <= self.epsilon + AUDIT_TOL
    }
}

/// Exact output distribution of the learner on `dataset`, indexed by the
/// enumeration order of its class.
pub fn output_distribution(
    dataset: &PpmDataset,
    epsilon: f64,
    pool_cap: Option<usize>,
    budget: u128,
) -> Result<(HalfspaceFamily, MechanismDistribution)> {
    check_epsilon(epsilon)?;
    let family = HalfspaceFamily::from_dataset(dataset, pool_cap);
    let class = enumerate_class(&family, dataset.dim());
    let part = partition(dataset);
    let mistakes = class_mistakes(&class, &part.all, budget)?;
    let dist = mechanism_distribution(&mistakes, epsilon, dataset.len() as u64)?;
    Ok((family, dist))
}

/// Compares the output distributions of `dataset` and the neighbor that
/// replaces entry `index` with `(x, y)`.
pub fn audit_neighbor(
    dataset: &PpmDataset,
    epsilon: f64,
    pool_cap: Option<usize>,
    budget: u128,
    index: usize,
    x: Vec<f64>,
    y: bool,
) -> Result<f64> {
    let entry = dataset.examples().get(index).ok_or(Error::IndexOutOfRange {
        index,
        len: dataset.len(),
    })?;
    if !entry.is_private() {
        return Err(Error::IllegalNeighbor(index));
    }
    let neighbor = dataset.with_replaced(index, x, y)?;
    let (fa, pa) = output_distribution(dataset, epsilon, pool_cap, budget)?;
    let (fb, pb) = output_distribution(&neighbor, epsilon, pool_cap, budget)?;
    if fa != fb {
        // distinct classes make the pointwise ratio meaningless
        return Ok(f64::INFINITY);
    }
    Ok(max_log_ratio(&pa, &pb))
}

/// Audits `options.trials` random neighbors, each replacing a uniformly
/// chosen private entry with a fresh `x ~ N(0, I)` and a fair-coin label.
pub fn verify_dp(dataset: &PpmDataset, epsilon: f64, options: &AuditOptions, seed: u64) -> Result<DpAudit> {
    check_epsilon(epsilon)?;
    let (family, base) = output_distribution(dataset, epsilon, options.pool_cap, options.budget)?;
    let class_size = enumerate_class(&family, dataset.dim()).cardinality();
    let private: Vec<usize> = (0..dataset.len()).filter(|&i| dataset.examples()[i].is_private()).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    if !private.is_empty() {
        for _ in 0..options.trials {
            let index = private[rng.random_range(0..private.len())];
            let x: Vec<f64> = (0..dataset.dim()).map(|_| rng.sample(StandardNormal)).collect();
            let y = rng.random_bool(0.5);
            let neighbor = dataset.with_replaced(index, x, y)?;
            let (nf, nd) = output_distribution(&neighbor, epsilon, options.pool_cap, options.budget)?;
            let ratio = if nf == family {
                max_log_ratio(&base, &nd)
            } else {
                f64::INFINITY
            };
            pairs.push(PairAudit {
                index,
                max_log_ratio: ratio,
            });
        }
    }
    let max_log_ratio = pairs.iter().map(|p| p.max_log_ratio).fold(0.0, f64::max);
    Ok(DpAudit {
        epsilon,
        class_size,
        pairs,
        max_log_ratio,
    })
}
