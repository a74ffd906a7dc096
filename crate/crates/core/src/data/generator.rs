use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{orthonormalize, scale_of, Halfspace, MEMBERSHIP_TOL};
use crate::model::{Example, LabeledPoint, PpmDataset, Privacy};

const SAMPLE_STREAM: u64 = 0;
const HOLDOUT_STREAM: u64 = 1;
const SUBSPACE_STREAM: u64 = 2;
const MAX_RESAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Marginal {
    Gaussian,
    /// Uniform on `[-1, 1]^d`.
    UniformCube,
    /// Standard gaussian coordinates on a `k`-dimensional affine subspace
    /// drawn from the seed.
    LowDimAffine { k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub dim: usize,
    pub marginal: Marginal,
    pub target: Halfspace,
    /// Label flip rate η in `[0, 0.5)`.
    pub label_noise: f64,
    /// Rate ρ in `[0, 0.5]` at which the privacy bit disagrees with the label.
    pub privacy_flip: f64,
    pub seed: u64,
}

/// `x · 1/√d ≥ 0`.
pub fn default_target(dim: usize) -> Halfspace {
    Halfspace::new(vec![1.0; dim.max(1)], 0.0).expect("nonzero normal")
}

impl GeneratorSpec {
    /// Gaussian marginal, default target, no noise.
    pub fn new(dim: usize, seed: u64) -> Self {
        Self {
            dim,
            marginal: Marginal::Gaussian,
            target: default_target(dim),
            label_noise: 0.0,
            privacy_flip: 0.0,
            seed,
        }
    }

    pub fn with_noise(mut self, eta: f64) -> Self {
        self.label_noise = eta;
        self
    }

    pub fn with_privacy_flip(mut self, rho: f64) -> Self {
        self.privacy_flip = rho;
        self
    }

    pub fn with_marginal(mut self, marginal: Marginal) -> Self {
        self.marginal = marginal;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.target.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: self.target.dim(),
            });
        }
        if !(0.0..0.5).contains(&self.label_noise) {
            return Err(Error::OutOfRange(format!("label noise {} not in [0, 0.5)", self.label_noise)));
        }
        if !(0.0..=0.5).contains(&self.privacy_flip) {
            return Err(Error::OutOfRange(format!("privacy flip {} not in [0, 0.5]", self.privacy_flip)));
        }
        if let Marginal::LowDimAffine { k } = self.marginal {
            if k == 0 || k > self.dim {
                return Err(Error::OutOfRange(format!("subspace dimension {k} not in 1..={}", self.dim)));
            }
        }
        Ok(())
    }
}

struct Sampler {
    dim: usize,
    marginal: Marginal,
    base: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

impl Sampler {
    fn new(spec: &GeneratorSpec) -> Self {
        let (base, basis) = match spec.marginal {
            Marginal::LowDimAffine { k } => {
                let mut rng = stream(spec.seed, SUBSPACE_STREAM);
                let base: Vec<f64> = (0..spec.dim).map(|_| 0.1 * rng.sample::<f64, _>(StandardNormal)).collect();
                let mut basis = Vec::new();
                while basis.len() < k {
                    let raw: Vec<Vec<f64>> = (0..k)
                        .map(|_| (0..spec.dim).map(|_| rng.sample(StandardNormal)).collect())
                        .collect();
                    basis = orthonormalize(&raw, 1e-6);
                }
                (base, basis)
            }
            _ => (Vec::new(), Vec::new()),
        };
        Self {
            dim: spec.dim,
            marginal: spec.marginal,
            base,
            basis,
        }
    }

    fn point<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self.marginal {
            Marginal::Gaussian => (0..self.dim).map(|_| rng.sample(StandardNormal)).collect(),
            Marginal::UniformCube => (0..self.dim).map(|_| rng.random_range(-1.0..=1.0)).collect(),
            Marginal::LowDimAffine { .. } => {
                let mut x = self.base.clone();
                for b in &self.basis {
                    let z: f64 = rng.sample(StandardNormal);
                    for (xi, bi) in x.iter_mut().zip(b) {
                        *xi += z * bi;
                    }
                }
                x
            }
        }
    }

    /// A point away from the target's boundary and its noisy label.
    fn labeled<R: Rng>(&self, target: &Halfspace, eta: f64, rng: &mut R) -> Result<(Vec<f64>, bool)> {
        for _ in 0..MAX_RESAMPLES {
            let x = self.point(rng);
            if target.signed_gap(&x).abs() <= MEMBERSHIP_TOL * scale_of(&x) {
                continue;
            }
            let flip = rng.random::<f64>() < eta;
            let y = target.contains(&x) != flip;
            return Ok((x, y));
        }
        Err(Error::DegenerateParameters(
            "marginal concentrates on the target boundary".into(),
        ))
    }
}

fn stream(seed: u64, id: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// `n` i.i.d. examples: label `h*(x) XOR Bernoulli(η)`, private iff
/// `label XOR Bernoulli(ρ)` is 1.
pub fn generate(spec: &GeneratorSpec, n: usize) -> Result<PpmDataset> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let sampler = Sampler::new(spec);
    let mut rng = stream(spec.seed, SAMPLE_STREAM);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let (x, y) = sampler.labeled(&spec.target, spec.label_noise, &mut rng)?;
        let flip = rng.random::<f64>() < spec.privacy_flip;
        let privacy = if y != flip { Privacy::Private } else { Privacy::Public };
        out.push(Example::new(x, y, privacy));
    }
    PpmDataset::new(spec.dim, out)
}

/// `m` labeled draws from the same distribution on an independent stream.
pub fn generate_holdout(spec: &GeneratorSpec, m: usize) -> Result<Vec<LabeledPoint>> {
    spec.validate()?;
    let sampler = Sampler::new(spec);
    let mut rng = stream(spec.seed, HOLDOUT_STREAM);
    (0..m)
        .map(|_| {
            sampler
                .labeled(&spec.target, spec.label_noise, &mut rng)
                .map(|(x, y)| LabeledPoint::new(x, y))
        })
        .collect()
}
