use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::class::{enumerate_class, ClassG, IntersectionHypothesis};
use super::family::HalfspaceFamily;
use super::score::{Backend, Scorer};
use crate::error::{Error, Result};
use crate::model::{partition, ErrorCount, LabeledPoint, PpmDataset};

pub const DEFAULT_BUDGET: u128 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// Exact inversion of the mechanism distribution; the audited path.
    #[default]
    Exact,
    /// Single pass argmax of perturbed scores; not audited.
    GumbelMax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnOptions {
    pub pool_cap: Option<usize>,
    pub budget: u128,
    pub sampling: Sampling,
    pub backend: Backend,
}

impl Default for LearnOptions {
    fn default() -> Self {
        Self {
            pool_cap: None,
            budget: DEFAULT_BUDGET,
            sampling: Sampling::Exact,
            backend: Backend::Auto,
        }
    }
}

impl LearnOptions {
    pub fn with_pool_cap(mut self, cap: Option<usize>) -> Self {
        self.pool_cap = cap;
        self
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }
}

/// Number of hypotheses of `G` at each mistake count.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MistakeHistogram {
    /// `counts[k]` hypotheses make exactly `k` mistakes.
    pub counts: Vec<u64>,
}

impl MistakeHistogram {
    fn add(&mut self, mistakes: u32) {
        let k = mistakes as usize;
        if self.counts.len() <= k {
            self.counts.resize(k + 1, 0);
        }
        self.counts[k] += 1;
    }

    pub fn min_mistakes(&self) -> Option<u32> {
        self.counts.iter().position(|&c| c > 0).map(|k| k as u32)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `ln Σ_g exp(-ε · mistakes(g) / 2)`.
    pub fn log_normalizer(&self, epsilon: f64) -> f64 {
        let Some(kmin) = self.min_mistakes() else {
            return f64::NEG_INFINITY;
        };
        let shifted: f64 = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| c as f64 * (-epsilon * (k as f64 - kmin as f64) / 2.0).exp())
            .sum();
        -epsilon * kmin as f64 / 2.0 + shifted.ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub family_size: usize,
    pub before_dedup: usize,
    pub class_size: u128,
    pub n: usize,
    pub n_public: usize,
    pub epsilon: f64,
    pub sampling: Sampling,
    /// Enumeration index of the selected hypothesis.
    pub selected_index: u64,
    pub selected_error: ErrorCount,
    pub best_error: ErrorCount,
    /// Empty for the Gumbel-max path.
    pub histogram: MistakeHistogram,
    /// `ln Z` of the unshifted weights; NaN for the Gumbel-max path.
    pub log_normalizer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismOutcome {
    pub hypothesis: IntersectionHypothesis,
    pub family: HalfspaceFamily,
    pub diagnostics: Diagnostics,
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    if epsilon > 1.0 {
        log::warn!("epsilon {epsilon} exceeds 1; accepted");
    }
    Ok(())
}

pub(crate) fn check_budget(class: &ClassG<'_>, budget: u128) -> Result<()> {
    let size = class.cardinality();
    if size > budget {
        return Err(Error::ClassTooLarge { size, budget });
    }
    Ok(())
}

/// Runs the private learner with a generator seeded from `seed`.
pub fn learn_half(dataset: &PpmDataset, epsilon: f64, options: &LearnOptions, seed: u64) -> Result<MechanismOutcome> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    learn_half_with_rng(dataset, epsilon, options, &mut rng)
}

/// Builds the family from the public examples, scores every hypothesis of
/// `G` on the whole sample, and selects one with probability proportional
/// to `exp(-ε · mistakes / 2)`, which is `exp(ε n q / 2)` for `q = -err`.
pub fn learn_half_with_rng<R: Rng + ?Sized>(
    dataset: &PpmDataset,
    epsilon: f64,
    options: &LearnOptions,
    rng: &mut R,
) -> Result<MechanismOutcome> {
    check_epsilon(epsilon)?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let part = partition(dataset);
    let family = HalfspaceFamily::from_dataset(dataset, options.pool_cap);
    let class = enumerate_class(&family, dataset.dim());
    check_budget(&class, options.budget)?;
    let scorer = Scorer::new(&family, &part.all, options.backend);
    let n = part.all.len() as u64;

    let (selected_index, members, selected, histogram, log_normalizer, best) = match options.sampling {
        Sampling::Exact => {
            let histogram = histogram_of(&scorer, &class);
            let kmin = histogram.min_mistakes().expect("G holds EmptyRegion");
            let (k, rank) = draw_level(&histogram, epsilon, rng);
            let (index, members) = find_nth_at_level(&scorer, &class, k, rank);
            let lz = histogram.log_normalizer(epsilon);
            (index, members, k, histogram, lz, kmin)
        }
        Sampling::GumbelMax => {
            let (index, members, k, best) = gumbel_select(&scorer, &class, epsilon, rng);
            (index, members, k, MistakeHistogram::default(), f64::NAN, best)
        }
    };
    let hypothesis = if members.is_empty() {
        IntersectionHypothesis::EmptyRegion
    } else {
        IntersectionHypothesis::Region(members)
    };
    let diagnostics = Diagnostics {
        family_size: family.len(),
        before_dedup: family.before_dedup(),
        class_size: class.cardinality(),
        n: part.all.len(),
        n_public: part.public.len(),
        epsilon,
        sampling: options.sampling,
        selected_index,
        selected_error: ErrorCount::new(selected as u64, n),
        best_error: ErrorCount::new(best as u64, n),
        histogram,
        log_normalizer,
    };
    Ok(MechanismOutcome {
        hypothesis,
        family,
        diagnostics,
    })
}

fn histogram_of(scorer: &Scorer, class: &ClassG<'_>) -> MistakeHistogram {
    let mut h = MistakeHistogram::default();
    let _ = scorer.visit(class, |_, _, m| {
        h.add(m);
        ControlFlow::Continue(())
    });
    h
}

/// Draws a mistake level `k` with probability `c_k e^{-ε k/2} / Z`, then a
/// uniform rank among the `c_k` hypotheses at that level.
fn draw_level<R: Rng + ?Sized>(h: &MistakeHistogram, epsilon: f64, rng: &mut R) -> (u32, u64) {
    let kmin = h.min_mistakes().expect("non-empty histogram") as f64;
    let weights: Vec<f64> = h
        .counts
        .iter()
        .enumerate()
        .map(|(k, &c)| c as f64 * (-epsilon * (k as f64 - kmin) / 2.0).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut level = None;
    for (k, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        acc += w;
        level = Some(k);
        if u < acc {
            break;
        }
    }
    let k = level.expect("some level has positive weight");
    let rank = rng.random_range(0..h.counts[k]);
    (k as u32, rank)
}

fn find_nth_at_level(scorer: &Scorer, class: &ClassG<'_>, level: u32, rank: u64) -> (u64, Vec<usize>) {
    let mut seen = 0u64;
    let mut found = None;
    let _ = scorer.visit(class, |index, members, m| {
        if m == level {
            if seen == rank {
                found = Some((index, members.to_vec()));
                return ControlFlow::Break(());
            }
            seen += 1;
        }
        ControlFlow::Continue(())
    });
    found.expect("rank within level count")
}

fn gumbel_select<R: Rng + ?Sized>(
    scorer: &Scorer,
    class: &ClassG<'_>,
    epsilon: f64,
    rng: &mut R,
) -> (u64, Vec<usize>, u32, u32) {
    let mut best_key = f64::NEG_INFINITY;
    let mut chosen = (0u64, Vec::new(), 0u32);
    let mut min_mistakes = u32::MAX;
    let _ = scorer.visit(class, |index, members, m| {
        min_mistakes = min_mistakes.min(m);
        let u: f64 = rng.random();
        // 1 - u lies in (0, 1]
        let gumbel = -(-(1.0 - u).ln()).ln();
        let key = -epsilon * m as f64 / 2.0 + gumbel;
        if key > best_key {
            best_key = key;
            chosen = (index, members.to_vec(), m);
        }
        ControlFlow::Continue(())
    });
    (chosen.0, chosen.1, chosen.2, min_mistakes)
}

/// Exhaustive minimum of the mistake count over `class`; ties go to the
/// earliest hypothesis in enumeration order.
pub fn best_in_class(class: &ClassG<'_>, sample: &[LabeledPoint]) -> Result<(IntersectionHypothesis, ErrorCount)> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    check_sample_dim(class, sample)?;
    let scorer = Scorer::new(class.family(), sample, Backend::Auto);
    let mut best: Option<(u32, Vec<usize>)> = None;
    let _ = scorer.visit(class, |_, members, m| {
        if best.as_ref().is_none_or(|(b, _)| m < *b) {
            best = Some((m, members.to_vec()));
        }
        ControlFlow::Continue(())
    });
    let (m, members) = best.expect("G holds EmptyRegion");
    let h = if members.is_empty() {
        IntersectionHypothesis::EmptyRegion
    } else {
        IntersectionHypothesis::Region(members)
    };
    Ok((h, ErrorCount::new(m as u64, sample.len() as u64)))
}

/// Mistake count of every hypothesis of `class`, in enumeration order.
pub fn class_mistakes(class: &ClassG<'_>, sample: &[LabeledPoint], budget: u128) -> Result<Vec<u32>> {
    check_budget(class, budget)?;
    check_sample_dim(class, sample)?;
    let scorer = Scorer::new(class.family(), sample, Backend::Auto);
    let mut out = Vec::with_capacity(class.cardinality() as usize);
    let _ = scorer.visit(class, |_, _, m| {
        out.push(m);
        ControlFlow::Continue(())
    });
    Ok(out)
}

fn check_sample_dim(class: &ClassG<'_>, sample: &[LabeledPoint]) -> Result<()> {
    match sample.iter().find(|p| p.x.len() != class.dim()) {
        Some(p) => Err(Error::DimensionMismatch {
            expected: class.dim(),
            got: p.x.len(),
        }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::class::predict;
    use crate::model::{empirical_error, Example, Privacy};

    fn ds(points: &[(f64, bool, Privacy)]) -> PpmDataset {
        PpmDataset::new(1, points.iter().map(|&(x, y, p)| Example::new(vec![x], y, p)).collect()).unwrap()
    }

    fn label_determined_1d(n: usize) -> PpmDataset {
        let pts: Vec<_> = (0..n)
            .map(|i| {
                let x = i as f64 - (n as f64) / 2.0 + 0.5;
                let y = x >= 0.0;
                (x, y, if y { Privacy::Private } else { Privacy::Public })
            })
            .collect();
        ds(&pts)
    }

    #[test]
    fn all_private_returns_empty_region() {
        let d = ds(&[(0.5, true, Privacy::Private), (-1.0, false, Privacy::Private)]);
        let out = learn_half(&d, 1.0, &LearnOptions::default(), 3).unwrap();
        assert_eq!(out.hypothesis, IntersectionHypothesis::EmptyRegion);
        assert!(out.family.is_empty());
        assert_eq!(out.diagnostics.class_size, 1);
        assert!(predict(&out.hypothesis, &out.family, &[123.0]).unwrap());
    }

    #[test]
    fn bad_epsilon_and_budget() {
        let d = label_determined_1d(6);
        assert_eq!(
            learn_half(&d, 0.0, &LearnOptions::default(), 0).unwrap_err(),
            Error::InvalidEpsilon(0.0)
        );
        let err = learn_half(&d, 1.0, &LearnOptions::default().with_budget(3), 0).unwrap_err();
        assert!(matches!(err, Error::ClassTooLarge { size: 7, budget: 3 }));
        assert!(err.to_string().contains("class too large"));
    }

    #[test]
    fn large_epsilon_selects_minimizer() {
        let d = label_determined_1d(10);
        let part = partition(&d);
        let family = HalfspaceFamily::from_dataset(&d, None);
        let class = enumerate_class(&family, 1);
        let (_, best) = best_in_class(&class, &part.all).unwrap();
        let misses = (0..200)
            .filter(|&s| {
                let out = learn_half(&d, 100.0, &LearnOptions::default(), s).unwrap();
                out.diagnostics.selected_error != best
            })
            .count();
        assert!(misses <= 2);
    }

    #[test]
    fn reported_error_matches_prediction() {
        let d = label_determined_1d(12);
        let part = partition(&d);
        for sampling in [Sampling::Exact, Sampling::GumbelMax] {
            let opts = LearnOptions {
                sampling,
                ..LearnOptions::default()
            };
            for seed in 0..20 {
                let out = learn_half(&d, 1.0, &opts, seed).unwrap();
                let g = super::super::class::BoundHypothesis {
                    hypothesis: &out.hypothesis,
                    family: &out.family,
                };
                let e = empirical_error(&g, &part.all).unwrap();
                assert_eq!(e, out.diagnostics.selected_error);
                let class = enumerate_class(&out.family, 1);
                assert_eq!(class.hypothesis_at(out.diagnostics.selected_index as u128), Some(out.hypothesis.clone()));
            }
        }
    }

    #[test]
    fn backends_agree() {
        let d = ds(&[
            (-2.0, false, Privacy::Public),
            (-0.5, true, Privacy::Public),
            (0.0, false, Privacy::Public),
            (1.0, true, Privacy::Private),
            (1.0, false, Privacy::Public),
            (3.0, true, Privacy::Private),
        ]);
        let part = partition(&d);
        let family = HalfspaceFamily::from_dataset(&d, None);
        let class = enumerate_class(&family, 1);
        let collect = |b| {
            let s = Scorer::new(&family, &part.all, b);
            let mut v = Vec::new();
            let _ = s.visit(&class, |i, m, k| {
                v.push((i, m.to_vec(), k));
                ControlFlow::Continue(())
            });
            v
        };
        let ranges = collect(Backend::Ranges);
        assert_eq!(ranges, collect(Backend::Bitset));
        // and both agree with direct prediction
        for (i, _, k) in &ranges {
            let g = class.hypothesis_at(*i as u128).unwrap();
            let direct = part.all.iter().filter(|p| predict(&g, &family, &p.x).unwrap() != p.y).count();
            assert_eq!(direct as u32, *k);
        }
    }

    #[test]
    fn single_point_aff_ranges() {
        // one public point: aff is that point
        let d = ds(&[
            (0.0, false, Privacy::Public),
            (0.0, false, Privacy::Private),
            (1.0, true, Privacy::Private),
            (-1.0, true, Privacy::Private),
        ]);
        let part = partition(&d);
        let family = HalfspaceFamily::from_dataset(&d, None);
        assert_eq!(family.aff().dim(), 0);
        let class = enumerate_class(&family, 1);
        let a = class_mistakes(&class, &part.all, DEFAULT_BUDGET).unwrap();
        let s = Scorer::new(&family, &part.all, Backend::Bitset);
        let mut b = Vec::new();
        let _ = s.visit(&class, |_, _, k| {
            b.push(k);
            ControlFlow::Continue(())
        });
        assert_eq!(a, b);
        assert_eq!(a, vec![2, 0, 0]);
    }

    #[test]
    fn histogram_normalizer() {
        let h = MistakeHistogram { counts: vec![1, 0, 2] };
        let lz = h.log_normalizer(1.0);
        assert!((lz - (1.0 + 2.0 * (-1.0f64).exp()).ln()).abs() < 1e-12);
    }
}
