use serde::{Deserialize, Serialize};

use super::family::HalfspaceFamily;
use crate::combinations::{binomial, Combinations};
use crate::error::{Error, Result};
use crate::model::Classifier;

/// An element of the class G.
///
/// `Region(members)` labels `x` with 0 exactly when `x` lies in every member
/// halfspace and in the family's affine span; `EmptyRegion` labels every
/// point 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntersectionHypothesis {
    EmptyRegion,
    /// Strictly increasing indices into the family, `1..=dim` of them.
    Region(Vec<usize>),
}

impl IntersectionHypothesis {
    pub fn members(&self) -> &[usize] {
        match self {
            IntersectionHypothesis::EmptyRegion => &[],
            IntersectionHypothesis::Region(m) => m,
        }
    }

    fn from_members(members: &[usize]) -> Self {
        if members.is_empty() {
            IntersectionHypothesis::EmptyRegion
        } else {
            IntersectionHypothesis::Region(members.to_vec())
        }
    }
}

/// Label of `x` under `g`; `true` is label 1.
pub fn predict(g: &IntersectionHypothesis, family: &HalfspaceFamily, x: &[f64]) -> Result<bool> {
    if x.len() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            got: x.len(),
        });
    }
    Ok(predict_unchecked(g, family, x))
}

pub(crate) fn predict_unchecked(g: &IntersectionHypothesis, family: &HalfspaceFamily, x: &[f64]) -> bool {
    match g {
        IntersectionHypothesis::EmptyRegion => true,
        IntersectionHypothesis::Region(members) => {
            let inside = family.aff().contains(x)
                && members.iter().all(|&i| family.halfspaces()[i].contains(x));
            !inside
        }
    }
}

/// A hypothesis together with the family it indexes into.
#[derive(Debug, Clone, Copy)]
pub struct BoundHypothesis<'a> {
    pub hypothesis: &'a IntersectionHypothesis,
    pub family: &'a HalfspaceFamily,
}

impl Classifier for BoundHypothesis<'_> {
    fn predict(&self, x: &[f64]) -> bool {
        predict_unchecked(self.hypothesis, self.family, x)
    }
}

/// The class G over a family, enumerated without materialization:
/// `EmptyRegion` first, then every strictly increasing member tuple of
/// size 1, then size 2, up to `dim`, each size in lexicographic order.
#[derive(Debug, Clone, Copy)]
pub struct ClassG<'a> {
    family: &'a HalfspaceFamily,
    dim: usize,
}

pub fn enumerate_class(family: &HalfspaceFamily, dim: usize) -> ClassG<'_> {
    ClassG { family, dim }
}

impl<'a> ClassG<'a> {
    pub fn family(&self) -> &'a HalfspaceFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `1 + sum_{j=1..d} C(|family|, j)`, saturating.
    pub fn cardinality(&self) -> u128 {
        let m = self.family.len() as u64;
        (1..=self.dim as u64).fold(1u128, |acc, j| acc.saturating_add(binomial(m, j)))
    }

    /// The `O(2^d n_pub^(d^2))` envelope `(2 * sum_j C(pool, j))^d + 1`.
    pub fn size_envelope(&self) -> u128 {
        let p = self.family.pool_indices().len() as u64;
        let w: u128 = (1..=self.dim as u64).map(|j| binomial(p, j)).sum();
        (2 * w).saturating_pow(self.dim as u32).saturating_add(1)
    }

    pub fn iter(&self) -> ClassIter {
        ClassIter {
            m: self.family.len(),
            dim: self.dim,
            size: 0,
            combos: None,
        }
    }

    /// Hypothesis at position `index` of the enumeration.
    pub fn hypothesis_at(&self, index: u128) -> Option<IntersectionHypothesis> {
        if index == 0 {
            return Some(IntersectionHypothesis::EmptyRegion);
        }
        let m = self.family.len();
        let mut rest = index - 1;
        for size in 1..=self.dim {
            let count = binomial(m as u64, size as u64);
            if rest < count {
                return Some(IntersectionHypothesis::Region(unrank(m, size, rest)));
            }
            rest -= count;
        }
        None
    }
}

/// Lexicographic unranking of a `size`-subset of `0..m`.
fn unrank(m: usize, size: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(size);
    let mut next = 0;
    for slot in 0..size {
        loop {
            let remaining = (size - slot - 1) as u64;
            let with_next = binomial((m - next - 1) as u64, remaining);
            if rank < with_next {
                out.push(next);
                next += 1;
                break;
            }
            rank -= with_next;
            next += 1;
        }
    }
    out
}

pub struct ClassIter {
    m: usize,
    dim: usize,
    size: usize,
    combos: Option<Combinations>,
}

impl Iterator for ClassIter {
    type Item = IntersectionHypothesis;

    fn next(&mut self) -> Option<Self::Item> {
        if self.size == 0 {
            self.size = 1;
            return Some(IntersectionHypothesis::EmptyRegion);
        }
        loop {
            if self.size > self.dim {
                return None;
            }
            let combos = self
                .combos
                .get_or_insert_with(|| Combinations::new(self.m, self.size));
            if let Some(t) = combos.next_combination() {
                return Some(IntersectionHypothesis::from_members(t));
            }
            self.size += 1;
            self.combos = None;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::family::construct_halfspace_family;
    use crate::model::LabeledPoint;

    fn family_1d(xs: &[f64]) -> HalfspaceFamily {
        let p: Vec<_> = xs.iter().map(|&x| LabeledPoint::new(vec![x], false)).collect();
        construct_halfspace_family(&p, 1, None)
    }

    #[test]
    fn cardinalities() {
        let f = family_1d(&[0.0, 1.0]);
        assert_eq!(f.len(), 4);
        assert_eq!(enumerate_class(&f, 2).cardinality(), 11);
        let e = HalfspaceFamily::empty(2);
        assert_eq!(enumerate_class(&e, 2).cardinality(), 1);
        let f10 = family_1d(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(f10.len(), 10);
        let c = enumerate_class(&f10, 3);
        assert_eq!(c.cardinality(), 176);
        let all: Vec<_> = c.iter().collect();
        assert_eq!(all.len(), 176);
        assert_eq!(all[0], IntersectionHypothesis::EmptyRegion);
        assert_eq!(all[1], IntersectionHypothesis::Region(vec![0]));
        assert_eq!(all[11], IntersectionHypothesis::Region(vec![0, 1]));
        assert_eq!(all[175], IntersectionHypothesis::Region(vec![7, 8, 9]));
        for (i, h) in all.iter().enumerate() {
            assert_eq!(c.hypothesis_at(i as u128).as_ref(), Some(h));
        }
        assert_eq!(c.hypothesis_at(176), None);
    }

    #[test]
    fn enumeration_is_restartable() {
        let f = family_1d(&[0.0, 1.0, 2.0]);
        let c = enumerate_class(&f, 2);
        assert_eq!(c.iter().collect::<Vec<_>>(), c.iter().collect::<Vec<_>>());
        assert!(c.cardinality() <= c.size_envelope());
    }

    #[test]
    fn prediction_examples() {
        let p: Vec<_> = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
            .iter()
            .map(|x| LabeledPoint::new(x.to_vec(), false))
            .collect();
        let f = construct_halfspace_family(&p, 2, None);
        // locate x >= 0 and y >= 0 among the singletons through the origin
        let x_pos = f
            .halfspaces()
            .iter()
            .position(|h| h.normal() == [1.0, 0.0] && h.offset() == 0.0)
            .unwrap();
        let pair = f
            .halfspaces()
            .iter()
            .position(|h| h.normal()[0].abs() < 1e-12 && h.normal()[1] > 0.0 && h.offset().abs() < 1e-12)
            .unwrap();
        let mut members = vec![x_pos, pair];
        members.sort();
        let g = IntersectionHypothesis::Region(members);
        assert!(!predict(&g, &f, &[1.0, 1.0]).unwrap());
        assert!(predict(&g, &f, &[-1.0, 1.0]).unwrap());
        assert!(predict(&IntersectionHypothesis::EmptyRegion, &f, &[3.0, 3.0]).unwrap());
        assert!(predict(&g, &f, &[1.0]).is_err());
    }

    #[test]
    fn prediction_respects_aff() {
        let p: Vec<_> = [[0.0, 0.0], [2.0, 0.0]]
            .iter()
            .map(|x| LabeledPoint::new(x.to_vec(), false))
            .collect();
        let f = construct_halfspace_family(&p, 2, None);
        assert_eq!(f.aff().dim(), 1);
        let x_pos = f
            .halfspaces()
            .iter()
            .position(|h| h.normal() == [1.0, 0.0] && h.offset() == 0.0)
            .unwrap();
        let g = IntersectionHypothesis::Region(vec![x_pos]);
        assert!(!predict(&g, &f, &[1.0, 0.0]).unwrap());
        assert!(predict(&g, &f, &[1.0, 0.5]).unwrap());
    }
}
