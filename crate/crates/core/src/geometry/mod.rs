//! Convex-geometry kernel: halfspaces, affine spans, hull facets, LP
//! feasibility and Helly witnesses.
//!
//! All predicates are closed and tolerance based. Membership in a halfspace
//! uses `MEMBERSHIP_TOL * (1 + |x|)`, membership in an affine subspace uses
//! `AFFINE_TOL * (1 + |x|)`, and LP constraints are relaxed by
//! `LP_SLACK * (1 + |offset|)`.

mod helly;
mod hull;
mod lp;

pub use helly::{helly_witness, HellyWitness};
pub use hull::hull_facet_halfspaces;
pub use lp::{region_feasible, Feasibility};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MEMBERSHIP_TOL: f64 = 1e-9;
pub const AFFINE_TOL: f64 = 1e-9;
pub const LP_SLACK: f64 = 1e-9;
/// Two canonical halfspaces closer than this in every coordinate of
/// `(w, w0)` are the same halfspace.
pub const DEDUP_TOL: f64 = 1e-9;

const UNIT_TOL: f64 = 1e-12;
const SIGN_TOL: f64 = 1e-12;
/// Minimum residual for a candidate direction to count as outside a span.
const COMPLEMENT_TOL: f64 = 1e-6;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Tolerance scale of a point.
#[inline]
pub(crate) fn scale_of(x: &[f64]) -> f64 {
    1.0 + norm(x)
}

/// Removes from `v` its components along the orthonormal `basis`, twice.
fn reject(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
    }
}

/// Modified Gram-Schmidt in the given order; vectors whose residual is at
/// most `tol` are dropped.
pub(crate) fn orthonormalize<V: AsRef<[f64]>>(vectors: &[V], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.as_ref().to_vec();
        reject(&mut r, &basis);
        let len = norm(&r);
        if len > tol {
            r.iter_mut().for_each(|c| *c /= len);
            basis.push(r);
        }
    }
    basis
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Closed halfspace `{x : normal . x >= offset}` with unit normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    normal: Vec<f64>,
    offset: f64,
    /// Dataset indices of the supporting set this halfspace was built from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<Vec<usize>>,
}

impl Halfspace {
    /// Builds a halfspace and brings it to canonical form (unit normal).
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let len = norm(&normal);
        if len.is_nan() || len <= 0.0 || !len.is_finite() || !offset.is_finite() {
            return Err(Error::ZeroNormal);
        }
        Ok(Self {
            normal,
            offset,
            source: None,
        }
        .canonical())
    }

    pub fn with_source(mut self, source: Vec<usize>) -> Self {
        self.source = Some(source);
        self
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn source(&self) -> Option<&[usize]> {
        self.source.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// Unit-normalizes `(w, w0)` unless `w` is already unit, and clears
    /// negative zeros. Applying it twice is a bit-exact no-op.
    pub fn canonical(mut self) -> Self {
        let len = norm(&self.normal);
        if (len - 1.0).abs() > UNIT_TOL {
            self.normal.iter_mut().for_each(|c| *c /= len);
            self.offset /= len;
        }
        self.normal.iter_mut().for_each(|c| *c += 0.0);
        self.offset += 0.0;
        self
    }

    /// `(-w, -w0)`: shares the bounding hyperplane, covers the other side.
    pub fn opposite(&self) -> Self {
        Self {
            normal: self.normal.iter().map(|c| -c).collect(),
            offset: -self.offset,
            source: self.source.clone(),
        }
        .canonical()
    }

    /// True when the first coordinate of the normal that is not ~0 is positive.
    pub fn has_canonical_sign(&self) -> bool {
        self.normal
            .iter()
            .find(|c| c.abs() > SIGN_TOL)
            .is_some_and(|c| *c > 0.0)
    }

    #[inline]
    pub fn signed_gap(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    /// Closed membership with tolerance `MEMBERSHIP_TOL * (1 + |x|)`.
    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        member_from_dot(dot(&self.normal, x), self.offset, scale_of(x))
    }

    #[inline]
    pub fn on_boundary(&self, x: &[f64]) -> bool {
        self.signed_gap(x).abs() <= MEMBERSHIP_TOL * scale_of(x)
    }

    pub fn try_contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.contains(x))
    }

    pub fn try_on_boundary(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.on_boundary(x))
    }

    /// Same halfspace within `tol` in every coordinate of `(w, w0)`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && (self.offset - other.offset).abs() <= tol
            && self
                .normal
                .iter()
                .zip(&other.normal)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Lexicographic order on `(w, w0)`.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        for (a, b) in self.normal.iter().zip(&other.normal) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => {}
                o => return o,
            }
        }
        self.offset.total_cmp(&other.offset)
    }
}

/// The membership rule shared by every closed-halfspace test: `dot` is
/// `w . x`, `scale` is `1 + |x|`.
#[inline]
pub(crate) fn member_from_dot(dot: f64, offset: f64, scale: f64) -> bool {
    dot >= offset - MEMBERSHIP_TOL * scale
}

impl crate::model::Classifier for Halfspace {
    fn predict(&self, x: &[f64]) -> bool {
        self.contains(x)
    }
}

/// Affine subspace `base + span(basis)` with an orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineSubspace {
    base: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

impl AffineSubspace {
    /// All of R^d, with the standard basis.
    pub fn full(dim: usize) -> Self {
        let basis = (0..dim)
            .map(|i| {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                e
            })
            .collect();
        Self {
            base: vec![0.0; dim],
            basis,
        }
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    /// Dimension `k` of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        let mut r = sub(x, &self.base);
        reject(&mut r, &self.basis);
        norm(&r)
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        self.is_full() || self.distance(x) <= AFFINE_TOL * scale_of(x)
    }

    pub fn try_contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.ambient_dim(), x.len())?;
        Ok(self.contains(x))
    }

    /// Coordinates of the projection of `x` in the chart `base + B z`.
    pub fn to_chart(&self, x: &[f64]) -> Vec<f64> {
        let r = sub(x, &self.base);
        self.basis.iter().map(|b| dot(&r, b)).collect()
    }

    pub fn from_chart(&self, z: &[f64]) -> Vec<f64> {
        let mut x = self.base.clone();
        for (zi, b) in z.iter().zip(&self.basis) {
            for (xj, bj) in x.iter_mut().zip(b) {
                *xj += zi * bj;
            }
        }
        x
    }
}

/// Minimal affine subspace through `points`; `k` is the numerical rank of
/// the centered points.
pub fn affine_span<P: AsRef<[f64]>>(points: &[P], dim: usize) -> Result<AffineSubspace> {
    let first = points.first().ok_or(Error::EmptySample)?.as_ref();
    for p in points {
        check_dim(dim, p.as_ref().len())?;
    }
    let scale = points
        .iter()
        .map(|p| norm(p.as_ref()))
        .fold(0.0, f64::max)
        + 1.0;
    let centered: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p.as_ref(), first)).collect();
    let basis = orthonormalize(&centered, AFFINE_TOL * scale);
    Ok(AffineSubspace {
        base: first.to_vec(),
        basis,
    })
}

/// A halfspace whose bounding hyperplane passes through all of `points`,
/// paired with its opposite.
///
/// The normal is the first vector of the orthogonal complement of the
/// points' direction span, found by orthogonalizing `e_1, ..., e_d` in
/// order. The first returned halfspace has the canonical sign.
pub fn supporting_halfspace_pair<P: AsRef<[f64]>>(
    points: &[P],
    dim: usize,
) -> Result<(Halfspace, Halfspace)> {
    supporting_pair_preferring(points, dim, &[])
}

/// Like [`supporting_halfspace_pair`], but tries the `preferred`
/// directions before the coordinate axes when picking the normal. Passing
/// the basis of an affine subspace keeps the normal inside it whenever the
/// points do not already span it.
pub fn supporting_pair_preferring<P: AsRef<[f64]>>(
    points: &[P],
    dim: usize,
    preferred: &[Vec<f64>],
) -> Result<(Halfspace, Halfspace)> {
    if points.is_empty() {
        return Err(Error::EmptySupportingSet);
    }
    if points.len() > dim {
        return Err(Error::OversizedSupportingSet {
            size: points.len(),
            dim,
        });
    }
    for p in points {
        check_dim(dim, p.as_ref().len())?;
    }
    let first = points[0].as_ref();
    let scale = points
        .iter()
        .map(|p| norm(p.as_ref()))
        .fold(0.0, f64::max)
        + 1.0;
    let centered: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p.as_ref(), first)).collect();
    let span = orthonormalize(&centered, AFFINE_TOL * scale);

    let axes = (0..dim).map(|i| {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        e
    });
    let mut normal = None;
    for candidate in preferred.iter().cloned().chain(axes) {
        let mut r = candidate;
        reject(&mut r, &span);
        let len = norm(&r);
        if len > COMPLEMENT_TOL {
            r.iter_mut().for_each(|c| *c /= len);
            normal = Some(r);
            break;
        }
    }
    // |points| <= d, so the span has dimension <= d - 1 and some axis
    // always leaves a residual of at least 1/sqrt(d).
    let normal = normal.ok_or(Error::ZeroNormal)?;
    let offset = dot(&normal, first);
    let h = Halfspace::new(normal, offset)?;
    let h = if h.has_canonical_sign() { h } else { h.opposite() };
    let opp = h.opposite();
    Ok((h, opp))
}
