//! Examples, mixed public/private datasets and exact empirical error.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Privacy status bit attached to every example.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Privacy {
    Public,
    Private,
}

impl Privacy {
    /// CSV encoding: 1 = private, 0 = public.
    pub fn bit(self) -> u8 {
        match self {
            Privacy::Public => 0,
            Privacy::Private => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Privacy::Public),
            1 => Some(Privacy::Private),
            _ => None,
        }
    }
}

/// A feature vector with its binary label. `y == true` is label 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub x: Vec<f64>,
    pub y: bool,
}

impl LabeledPoint {
    pub fn new(x: Vec<f64>, y: bool) -> Self {
        Self { x, y }
    }
}

/// A labeled sample such as S', S_pub or a holdout set.
pub type LabeledSample = Vec<LabeledPoint>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub x: Vec<f64>,
    pub y: bool,
    pub privacy: Privacy,
}

impl Example {
    pub fn new(x: Vec<f64>, y: bool, privacy: Privacy) -> Self {
        Self { x, y, privacy }
    }

    pub fn is_private(&self) -> bool {
        self.privacy == Privacy::Private
    }

    pub fn labeled(&self) -> LabeledPoint {
        LabeledPoint::new(self.x.clone(), self.y)
    }
}

/// An ordered, non-empty dataset of `(x, y, p)` triples in a fixed dimension.
///
/// Order is significant: every derived structure refers to examples by
/// their position in `examples`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PpmDataset {
    dim: usize,
    examples: Vec<Example>,
}

impl PpmDataset {
    pub fn new(dim: usize, examples: Vec<Example>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if examples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        for (index, e) in examples.iter().enumerate() {
            if e.x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: e.x.len(),
                });
            }
            if e.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(Self { dim, examples })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    /// Always false; empty datasets are rejected at construction.
    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn n_private(&self) -> usize {
        self.examples.iter().filter(|e| e.is_private()).count()
    }

    pub fn n_public(&self) -> usize {
        self.len() - self.n_private()
    }

    /// Replaces the features and label of one entry, keeping its privacy bit.
    pub fn with_replaced(&self, index: usize, x: Vec<f64>, y: bool) -> Result<Self> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            });
        }
        let mut examples = self.examples.clone();
        let privacy = examples[index].privacy;
        examples[index] = Example::new(x, y, privacy);
        Self::new(self.dim, examples)
    }
}

/// The three views of a dataset used by the learner.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// `S_pub`: public examples with labels retained.
    pub public: LabeledSample,
    /// `S_priv`: private examples.
    pub private: LabeledSample,
    /// `S'`: every `(x, y)` pair in dataset order.
    pub all: LabeledSample,
    pub public_indices: Vec<usize>,
    pub private_indices: Vec<usize>,
}

pub fn partition(dataset: &PpmDataset) -> Partition {
    let mut out = Partition {
        public: Vec::new(),
        private: Vec::new(),
        all: Vec::with_capacity(dataset.len()),
        public_indices: Vec::new(),
        private_indices: Vec::new(),
    };
    for (i, e) in dataset.examples().iter().enumerate() {
        let point = e.labeled();
        match e.privacy {
            Privacy::Public => {
                out.public.push(point.clone());
                out.public_indices.push(i);
            }
            Privacy::Private => {
                out.private.push(point.clone());
                out.private_indices.push(i);
            }
        }
        out.all.push(point);
    }
    out
}

/// Anything that assigns a binary label to a point.
pub trait Classifier {
    fn predict(&self, x: &[f64]) -> bool;
}

impl<F> Classifier for F
where
    F: Fn(&[f64]) -> bool,
{
    fn predict(&self, x: &[f64]) -> bool {
        self(x)
    }
}

/// Exact empirical error: an integer mistake count over a sample size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErrorCount {
    pub mistakes: u64,
    pub total: u64,
}

impl ErrorCount {
    pub fn new(mistakes: u64, total: u64) -> Self {
        debug_assert!(total > 0 && mistakes <= total);
        Self { mistakes, total }
    }

    pub fn rate(&self) -> f64 {
        self.mistakes as f64 / self.total as f64
    }
}

impl Ord for ErrorCount {
    /// Compares the rationals `mistakes / total` exactly.
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.mistakes as u128 * other.total as u128;
        let rhs = other.mistakes as u128 * self.total as u128;
        lhs.cmp(&rhs).then(self.total.cmp(&other.total))
    }
}

impl PartialOrd for ErrorCount {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ErrorCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.mistakes, self.total)
    }
}

pub fn empirical_error<C: Classifier + ?Sized>(
    classifier: &C,
    sample: &[LabeledPoint],
) -> Result<ErrorCount> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mistakes = sample
        .iter()
        .filter(|p| classifier.predict(&p.x) != p.y)
        .count();
    Ok(ErrorCount::new(mistakes as u64, sample.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ex(x: f64, y: bool, p: Privacy) -> Example {
        Example::new(vec![x], y, p)
    }

    #[test]
    fn partition_keeps_order_and_indices() {
        let ds = PpmDataset::new(
            1,
            vec![
                ex(1.0, false, Privacy::Public),
                ex(2.0, true, Privacy::Private),
                ex(3.0, false, Privacy::Public),
            ],
        )
        .unwrap();
        let p = partition(&ds);
        assert_eq!(p.public_indices, vec![0, 2]);
        assert_eq!(p.private_indices, vec![1]);
        assert_eq!(p.public.len() + p.private.len(), p.all.len());
        assert_eq!(p.all.iter().map(|q| q.x[0]).collect::<Vec<_>>(), vec![1.0, 2.0, 3.0]);
        assert_eq!(p.private[0].x, vec![2.0]);
    }

    #[test]
    fn all_private_partition() {
        let ds = PpmDataset::new(
            1,
            vec![ex(1.0, true, Privacy::Private), ex(2.0, true, Privacy::Private)],
        )
        .unwrap();
        let p = partition(&ds);
        assert!(p.public.is_empty());
        assert_eq!(p.private, p.all);
    }

    #[test]
    fn rejects_bad_datasets() {
        assert_eq!(PpmDataset::new(1, vec![]), Err(Error::EmptyDataset));
        assert_eq!(PpmDataset::new(0, vec![ex(1.0, true, Privacy::Public)]), Err(Error::ZeroDimension));
        assert!(matches!(
            PpmDataset::new(2, vec![ex(1.0, true, Privacy::Public)]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            PpmDataset::new(1, vec![ex(f64::NAN, true, Privacy::Public)]),
            Err(Error::NonFinite { index: 0 })
        );
    }

    #[test]
    fn constant_classifier_error() {
        let s = vec![
            LabeledPoint::new(vec![0.0], true),
            LabeledPoint::new(vec![1.0], true),
            LabeledPoint::new(vec![2.0], false),
        ];
        let one = |_: &[f64]| true;
        assert_eq!(empirical_error(&one, &s).unwrap(), ErrorCount::new(1, 3));
        assert_eq!(empirical_error(&one, &[]), Err(Error::EmptySample));
    }

    #[test]
    fn error_count_orders_exact_rationals() {
        assert!(ErrorCount::new(1, 3) < ErrorCount::new(2, 5));
        assert!(ErrorCount::new(2, 6) > ErrorCount::new(1, 3));
        assert!(ErrorCount::new(0, 4) < ErrorCount::new(1, 100));
    }

    proptest! {
        #[test]
        fn error_is_permutation_invariant_and_complements(
            xs in proptest::collection::vec((-10.0f64..10.0, any::<bool>()), 1..40),
            t in -10.0f64..10.0,
            rot in 0usize..40,
        ) {
            let s: Vec<_> = xs.iter().map(|&(x, y)| LabeledPoint::new(vec![x], y)).collect();
            let h = move |x: &[f64]| x[0] >= t;
            let not_h = move |x: &[f64]| x[0] < t;
            let mut rotated = s.clone();
            let k = rot % rotated.len();
            rotated.rotate_left(k);
            let e = empirical_error(&h, &s).unwrap();
            prop_assert_eq!(e, empirical_error(&h, &rotated).unwrap());
            let c = empirical_error(&not_h, &s).unwrap();
            prop_assert_eq!(e.mistakes + c.mistakes, e.total);
        }
    }
}
