use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinations::Combinations;
use crate::geometry::{affine_span, supporting_pair_preferring, AffineSubspace, Halfspace, DEDUP_TOL};
use crate::model::{partition, LabeledPoint, PpmDataset};

/// The finite halfspace family built from public points together with the
/// affine span of those points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceFamily {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    aff: AffineSubspace,
    pool_indices: Vec<usize>,
    before_dedup: usize,
}

impl HalfspaceFamily {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            halfspaces: Vec::new(),
            aff: AffineSubspace::full(dim),
            pool_indices: Vec::new(),
            before_dedup: 0,
        }
    }

    /// Builds the family from the public examples of `dataset`; sources and
    /// pool indices refer to positions in the dataset.
    pub fn from_dataset(dataset: &PpmDataset, pool_cap: Option<usize>) -> Self {
        let part = partition(dataset);
        let points: Vec<&[f64]> = part.public.iter().map(|p| p.x.as_slice()).collect();
        build(&points, &part.public_indices, dataset.dim(), pool_cap)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn len(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.halfspaces.is_empty()
    }

    pub fn aff(&self) -> &AffineSubspace {
        &self.aff
    }

    pub fn pool_indices(&self) -> &[usize] {
        &self.pool_indices
    }

    /// Number of halfspaces generated before duplicates were removed:
    /// exactly `2 * |W|`.
    pub fn before_dedup(&self) -> usize {
        self.before_dedup
    }

    /// Index of a member equal to `h` within the dedup tolerance.
    pub fn position_of(&self, h: &Halfspace) -> Option<usize> {
        self.halfspaces.iter().position(|m| m.approx_eq(h, DEDUP_TOL))
    }
}

/// Builds the family from `S_pub`. Sources refer to positions in `public`.
///
/// Only the first `pool_cap` points are used when a cap is given. Every
/// subset of `1..=dim` pool points contributes one supporting halfspace and
/// its opposite; exact duplicates (within `DEDUP_TOL`) are dropped, keeping
/// the first occurrence.
pub fn construct_halfspace_family(
    public: &[LabeledPoint],
    dim: usize,
    pool_cap: Option<usize>,
) -> HalfspaceFamily {
    let points: Vec<&[f64]> = public.iter().map(|p| p.x.as_slice()).collect();
    let ids: Vec<usize> = (0..public.len()).collect();
    build(&points, &ids, dim, pool_cap)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Dedup index keyed by offset so that candidates only meet members with a
/// nearby offset.
struct Dedup {
    by_offset: BTreeMap<Key, Vec<usize>>,
}

impl Dedup {
    fn insert_if_new(&mut self, h: Halfspace, kept: &mut Vec<Halfspace>) {
        let lo = Key(h.offset() - DEDUP_TOL);
        let hi = Key(h.offset() + DEDUP_TOL);
        let dup = self
            .by_offset
            .range(lo..=hi)
            .flat_map(|(_, v)| v.iter())
            .any(|&i| kept[i].approx_eq(&h, DEDUP_TOL));
        if !dup {
            self.by_offset.entry(Key(h.offset())).or_default().push(kept.len());
            kept.push(h);
        }
    }
}

fn build(points: &[&[f64]], ids: &[usize], dim: usize, pool_cap: Option<usize>) -> HalfspaceFamily {
    let m = pool_cap.map_or(points.len(), |c| c.min(points.len()));
    if m == 0 {
        return HalfspaceFamily::empty(dim);
    }
    let pool = &points[..m];
    let aff = affine_span(pool, dim).expect("non-empty pool of matching dimension");
    let preferred: &[Vec<f64>] = if aff.is_full() { &[] } else { aff.basis() };

    let mut kept = Vec::new();
    let mut dedup = Dedup {
        by_offset: BTreeMap::new(),
    };
    let mut before = 0;
    let mut subset: Vec<&[f64]> = Vec::with_capacity(dim);
    for size in 1..=dim.min(m) {
        let mut combos = Combinations::new(m, size);
        while let Some(idx) = combos.next_combination() {
            subset.clear();
            subset.extend(idx.iter().map(|&i| pool[i]));
            let (h, o) = supporting_pair_preferring(&subset, dim, preferred)
                .expect("subset size within 1..=dim");
            let source: Vec<usize> = idx.iter().map(|&i| ids[i]).collect();
            before += 2;
            dedup.insert_if_new(h.with_source(source.clone()), &mut kept);
            dedup.insert_if_new(o.with_source(source), &mut kept);
        }
    }
    HalfspaceFamily {
        dim,
        halfspaces: kept,
        aff,
        pool_indices: ids[..m].to_vec(),
        before_dedup: before,
    }
}
