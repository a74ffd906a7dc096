//! Streaming exact mistake counts for every hypothesis of a class.
//!
//! Two interchangeable backends compute the in-region set of a hypothesis
//! incrementally along the enumeration: packed bitsets over the sample (any
//! dimension) and index ranges over the sorted sample (d = 1, where every
//! halfspace and every affine span is a contiguous range).

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::class::ClassG;
use super::family::HalfspaceFamily;
use crate::model::LabeledPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Ranges when `dim == 1`, bitsets otherwise.
    #[default]
    Auto,
    Bitset,
    Ranges,
}

trait RegionAlgebra {
    type Region: Clone;
    fn whole(&self) -> Self::Region;
    fn meet(&self, base: &Self::Region, member: usize, out: &mut Self::Region);
    fn mistakes(&self, region: &Self::Region) -> u32;
    fn empty_region_mistakes(&self) -> u32;
}

struct Bitsets {
    words: usize,
    /// `members * words` words; member `i` occupies `[i * words, (i + 1) * words)`.
    masks: Vec<u64>,
    aff: Vec<u64>,
    ones: Vec<u64>,
    zeros: Vec<u64>,
    n_zero: u32,
}

fn pack(flags: impl Iterator<Item = bool>, words: usize) -> Vec<u64> {
    let mut out = vec![0u64; words];
    for (i, f) in flags.enumerate() {
        if f {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

impl Bitsets {
    fn new(family: &HalfspaceFamily, sample: &[LabeledPoint]) -> Self {
        let words = sample.len().div_ceil(64).max(1);
        let mut masks = Vec::with_capacity(family.len() * words);
        for h in family.halfspaces() {
            masks.extend(pack(sample.iter().map(|p| h.contains(&p.x)), words));
        }
        let aff = pack(sample.iter().map(|p| family.aff().contains(&p.x)), words);
        let ones = pack(sample.iter().map(|p| p.y), words);
        let zeros = pack(sample.iter().map(|p| !p.y), words);
        let n_zero = sample.iter().filter(|p| !p.y).count() as u32;
        Self {
            words,
            masks,
            aff,
            ones,
            zeros,
            n_zero,
        }
    }
}

impl RegionAlgebra for Bitsets {
    type Region = Vec<u64>;

    fn whole(&self) -> Vec<u64> {
        self.aff.clone()
    }

    #[inline]
    fn meet(&self, base: &Vec<u64>, member: usize, out: &mut Vec<u64>) {
        let m = &self.masks[member * self.words..(member + 1) * self.words];
        for ((o, b), w) in out.iter_mut().zip(base).zip(m) {
            *o = b & w;
        }
    }

    #[inline]
    fn mistakes(&self, region: &Vec<u64>) -> u32 {
        let mut inside_one = 0;
        let mut inside_zero = 0;
        for ((r, o), z) in region.iter().zip(&self.ones).zip(&self.zeros) {
            inside_one += (r & o).count_ones();
            inside_zero += (r & z).count_ones();
        }
        inside_one + self.n_zero - inside_zero
    }

    fn empty_region_mistakes(&self) -> u32 {
        self.n_zero
    }
}

/// d = 1: positions in the sorted sample.
struct Ranges {
    /// `members[i] = (lo, hi)`: member `i` contains sorted positions `lo..hi`.
    members: Vec<(u32, u32)>,
    aff: (u32, u32),
    prefix_one: Vec<u32>,
    prefix_zero: Vec<u32>,
    n_zero: u32,
}

impl Ranges {
    fn new(family: &HalfspaceFamily, sample: &[LabeledPoint]) -> Self {
        assert_eq!(family.dim(), 1);
        let mut sorted: Vec<&LabeledPoint> = sample.iter().collect();
        sorted.sort_by(|a, b| a.x[0].total_cmp(&b.x[0]));
        let n = sorted.len();
        let mut prefix_one = Vec::with_capacity(n + 1);
        let mut prefix_zero = Vec::with_capacity(n + 1);
        let (mut c1, mut c0) = (0u32, 0u32);
        prefix_one.push(0);
        prefix_zero.push(0);
        for p in &sorted {
            if p.y {
                c1 += 1;
            } else {
                c0 += 1;
            }
            prefix_one.push(c1);
            prefix_zero.push(c0);
        }
        // membership in x >= a is monotone non-decreasing along the sorted
        // order, membership in x <= a non-increasing
        let members = family
            .halfspaces()
            .iter()
            .map(|h| {
                if h.normal()[0] > 0.0 {
                    let lo = sorted.partition_point(|p| !h.contains(&p.x));
                    (lo as u32, n as u32)
                } else {
                    let hi = sorted.partition_point(|p| h.contains(&p.x));
                    (0, hi as u32)
                }
            })
            .collect();
        let aff = if family.aff().is_full() {
            (0, n as u32)
        } else {
            let a = family.aff();
            let u = a.base()[0];
            let lo = sorted.partition_point(|p| p.x[0] < u && !a.contains(&p.x));
            let hi = sorted.partition_point(|p| p.x[0] < u || a.contains(&p.x));
            (lo as u32, hi as u32)
        };
        Self {
            members,
            aff,
            prefix_one,
            prefix_zero,
            n_zero: c0,
        }
    }
}

impl RegionAlgebra for Ranges {
    type Region = (u32, u32);

    fn whole(&self) -> (u32, u32) {
        self.aff
    }

    #[inline]
    fn meet(&self, base: &(u32, u32), member: usize, out: &mut (u32, u32)) {
        let (lo, hi) = self.members[member];
        *out = (base.0.max(lo), base.1.min(hi));
    }

    #[inline]
    fn mistakes(&self, &(lo, hi): &(u32, u32)) -> u32 {
        if lo >= hi {
            return self.n_zero;
        }
        let (lo, hi) = (lo as usize, hi as usize);
        let inside_one = self.prefix_one[hi] - self.prefix_one[lo];
        let inside_zero = self.prefix_zero[hi] - self.prefix_zero[lo];
        inside_one + self.n_zero - inside_zero
    }

    fn empty_region_mistakes(&self) -> u32 {
        self.n_zero
    }
}

/// Precomputed membership of every sample point in every family member.
pub struct Scorer {
    inner: Inner,
    dim: usize,
    members: usize,
}

enum Inner {
    Bitsets(Bitsets),
    Ranges(Ranges),
}

impl Scorer {
    pub fn new(family: &HalfspaceFamily, sample: &[LabeledPoint], backend: Backend) -> Self {
        let ranges = match backend {
            Backend::Auto => family.dim() == 1,
            Backend::Ranges => {
                assert_eq!(family.dim(), 1, "range backend requires dimension 1");
                true
            }
            Backend::Bitset => false,
        };
        let inner = if ranges {
            Inner::Ranges(Ranges::new(family, sample))
        } else {
            Inner::Bitsets(Bitsets::new(family, sample))
        };
        Self {
            inner,
            dim: family.dim(),
            members: family.len(),
        }
    }

    /// Calls `visit(index, members, mistakes)` for every hypothesis of
    /// `class` in enumeration order; an empty `members` slice is
    /// `EmptyRegion`.
    pub fn visit<F>(&self, class: &ClassG<'_>, visit: F) -> ControlFlow<()>
    where
        F: FnMut(u64, &[usize], u32) -> ControlFlow<()>,
    {
        debug_assert_eq!(class.family().len(), self.members);
        debug_assert_eq!(class.family().dim(), self.dim);
        match &self.inner {
            Inner::Bitsets(b) => walk(b, self.members, class.dim(), visit),
            Inner::Ranges(r) => walk(r, self.members, class.dim(), visit),
        }
    }
}

fn walk<A: RegionAlgebra, F>(algebra: &A, m: usize, dim: usize, mut visit: F) -> ControlFlow<()>
where
    F: FnMut(u64, &[usize], u32) -> ControlFlow<()>,
{
    let mut index = 0u64;
    visit(index, &[], algebra.empty_region_mistakes())?;
    let whole = algebra.whole();
    let mut stack = vec![whole; dim + 1];
    let mut tuple = vec![0usize; dim];
    for size in 1..=dim.min(m) {
        descend(algebra, m, size, 0, 0, &mut stack, &mut tuple, &mut index, &mut visit)?;
    }
    ControlFlow::Continue(())
}

#[allow(clippy::too_many_arguments)]
fn descend<A: RegionAlgebra, F>(
    algebra: &A,
    m: usize,
    size: usize,
    level: usize,
    start: usize,
    stack: &mut [A::Region],
    tuple: &mut [usize],
    index: &mut u64,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(u64, &[usize], u32) -> ControlFlow<()>,
{
    // leave room for the remaining slots
    let end = m - (size - level - 1);
    for i in start..end {
        let (lower, upper) = stack.split_at_mut(level + 1);
        algebra.meet(&lower[level], i, &mut upper[0]);
        tuple[level] = i;
        if level + 1 == size {
            *index += 1;
            visit(*index, &tuple[..size], algebra.mistakes(&upper[0]))?;
        } else {
            descend(algebra, m, size, level + 1, i + 1, stack, tuple, index, visit)?;
        }
    }
    ControlFlow::Continue(())
}
