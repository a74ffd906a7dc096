use serde::{Deserialize, Serialize};

use super::{region_feasible, AffineSubspace, Halfspace};
use crate::combinations::Combinations;
use crate::error::{Error, Result};

/// A sub-collection of `family` (plus possibly `aff`) whose intersection
/// misses the target halfspace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HellyWitness {
    /// Indices into the family, strictly increasing.
    pub members: Vec<usize>,
    pub includes_aff: bool,
}

impl HellyWitness {
    pub fn size(&self) -> usize {
        self.members.len() + usize::from(self.includes_aff)
    }
}

/// Smallest sub-collection `T` of `family ∪ {aff}` with `|T| <= dim` and
/// `(⋂T) ∩ target = ∅`.
///
/// Subsets are searched by increasing size, lexicographically by member
/// index, with `aff` taking index `family.len()`.
pub fn helly_witness(
    family: &[Halfspace],
    aff: &AffineSubspace,
    target: &Halfspace,
    dim: usize,
) -> Result<HellyWitness> {
    let all: Vec<&Halfspace> = family.iter().collect();
    if !region_feasible(&all, aff).is_feasible() {
        return Err(Error::RegionAlreadyEmpty);
    }
    let mut with_target = all.clone();
    with_target.push(target);
    if region_feasible(&with_target, aff).is_feasible() {
        return Err(Error::TargetIntersectsRegion);
    }

    let whole = AffineSubspace::full(aff.ambient_dim());
    let m = family.len();
    for size in 1..=dim {
        let mut combos = Combinations::new(m + 1, size);
        while let Some(idx) = combos.next_combination() {
            let includes_aff = idx.last() == Some(&m);
            let members: Vec<usize> = idx.iter().copied().filter(|&i| i < m).collect();
            let mut constraints: Vec<&Halfspace> = members.iter().map(|&i| &family[i]).collect();
            constraints.push(target);
            let chart = if includes_aff { aff } else { &whole };
            if !region_feasible(&constraints, chart).is_feasible() {
                return Ok(HellyWitness {
                    members,
                    includes_aff,
                });
            }
        }
    }
    Err(Error::NoWitness { dim })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hull_facet_halfspaces;

    #[test]
    fn one_dimensional_witness() {
        let fam = vec![Halfspace::new(vec![-1.0], 0.0).unwrap()];
        let target = Halfspace::new(vec![1.0], 1.0).unwrap();
        let w = helly_witness(&fam, &AffineSubspace::full(1), &target, 1).unwrap();
        assert_eq!(w, HellyWitness { members: vec![0], includes_aff: false });
    }

    #[test]
    fn triangle_witness_is_small_and_empty() {
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let aff = AffineSubspace::full(2);
        let fam = hull_facet_halfspaces(&tri, &aff);
        let target = Halfspace::new(vec![1.0, 1.0], 2.0).unwrap();
        let w = helly_witness(&fam, &aff, &target, 2).unwrap();
        assert!(w.size() <= 2);
        let mut cons: Vec<&Halfspace> = w.members.iter().map(|&i| &fam[i]).collect();
        cons.push(&target);
        assert!(!region_feasible(&cons, &aff).is_feasible());
    }

    #[test]
    fn precondition_errors() {
        let aff = AffineSubspace::full(1);
        let fam = vec![Halfspace::new(vec![-1.0], 0.0).unwrap()];
        let touching = Halfspace::new(vec![1.0], -1.0).unwrap();
        assert_eq!(helly_witness(&fam, &aff, &touching, 1), Err(Error::TargetIntersectsRegion));
        let crossed = vec![
            Halfspace::new(vec![1.0], 1.0).unwrap(),
            Halfspace::new(vec![-1.0], 0.0).unwrap(),
        ];
        assert_eq!(helly_witness(&crossed, &aff, &touching, 1), Err(Error::RegionAlreadyEmpty));
    }

    #[test]
    fn flat_family_can_use_aff() {
        // public points on the line y = 0, target y >= 1: aff alone suffices
        let pts = [[0.0, 0.0], [1.0, 0.0]];
        let aff = crate::geometry::affine_span(&pts, 2).unwrap();
        let fam = hull_facet_halfspaces(&pts, &aff);
        let target = Halfspace::new(vec![0.0, 1.0], 1.0).unwrap();
        let w = helly_witness(&fam, &aff, &target, 2).unwrap();
        assert!(w.size() <= 2);
    }
}
