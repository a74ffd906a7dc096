//! Exact empirical risk minimization over halfspaces.
//!
//! Candidates are realized from hyperplanes through subsets of at most `d`
//! sample points. Each hyperplane is tried in both orientations with its
//! boundary points all inside, all outside (an offset nudge), and, when the
//! boundary is exactly the subset, with every boundary point on its
//! correct side (a least-norm perturbation). The two constant classifiers
//! complete the set. Every count is the true count of the realized
//! halfspace under [`Halfspace::contains`].

use std::cmp::Ordering;

use crate::combinations::Combinations;
use crate::error::{Error, Result};
use crate::geometry::{member_from_dot, scale_of, supporting_halfspace_pair, Halfspace, MEMBERSHIP_TOL};
use crate::model::{ErrorCount, LabeledPoint};

struct Best {
    mistakes: u64,
    halfspace: Halfspace,
}

impl Best {
    fn offer(slot: &mut Option<Best>, mistakes: u64, make: impl FnOnce() -> Option<Halfspace>) {
        let better = match slot {
            None => true,
            Some(b) => mistakes <= b.mistakes,
        };
        if !better {
            return;
        }
        let Some(h) = make() else { return };
        let replace = match slot {
            None => true,
            Some(b) => mistakes < b.mistakes || h.lex_cmp(&b.halfspace) == Ordering::Less,
        };
        if replace {
            *slot = Some(Best { mistakes, halfspace: h });
        }
    }
}

fn count(h: &Halfspace, sample: &[LabeledPoint]) -> u64 {
    sample.iter().filter(|p| h.contains(&p.x) != p.y).count() as u64
}

/// Solves the small dense system `m z = rhs` by Gaussian elimination.
fn solve_small(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[p][c].abs() < 1e-14 {
            return None;
        }
        m.swap(c, p);
        rhs.swap(c, p);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
            rhs[r] -= f * rhs[c];
        }
    }
    let mut z = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r][k] * z[k]).sum();
        z[r] = (rhs[r] - s) / m[r][r];
    }
    Some(z)
}

/// Perturbs `(w, w0)` so that `subset` point `i` lands at signed gap
/// `sides[i] * delta`.
fn perturb(
    w: &[f64],
    w0: f64,
    points: &[&[f64]],
    sides: &[f64],
    delta: f64,
) -> Option<Halfspace> {
    // rows [x_i, -1]; least-norm solution of A v = rhs is A^T (A A^T)^-1 rhs
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|x| x.iter().copied().chain(std::iter::once(-1.0)).collect())
        .collect();
    let rhs: Vec<f64> = points
        .iter()
        .zip(sides)
        .map(|(x, s)| {
            let gap: f64 = w.iter().zip(*x).map(|(a, b)| a * b).sum::<f64>() - w0;
            s * delta - gap
        })
        .collect();
    let gram: Vec<Vec<f64>> = rows
        .iter()
        .map(|a| rows.iter().map(|b| a.iter().zip(b).map(|(p, q)| p * q).sum()).collect())
        .collect();
    let y = solve_small(gram, rhs)?;
    let dim = w.len();
    let mut v = vec![0.0; dim + 1];
    for (yi, row) in y.iter().zip(&rows) {
        for (vk, rk) in v.iter_mut().zip(row) {
            *vk += yi * rk;
        }
    }
    let normal: Vec<f64> = w.iter().zip(&v[..dim]).map(|(a, b)| a + b).collect();
    // the -1 column carries -dw0, so w0 + dw0 = w0 - v[dim]
    Halfspace::new(normal, w0 - v[dim]).ok()
}

/// A halfspace with the minimum number of mistakes on `sample`; ties go to
/// the lexicographically smallest canonical `(w, w0)`.
pub fn erm_halfspace(sample: &[LabeledPoint], dim: usize) -> Result<(Halfspace, ErrorCount)> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(p) = sample.iter().find(|p| p.x.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: p.x.len(),
        });
    }
    let n = sample.len();
    let scales: Vec<f64> = sample.iter().map(|p| scale_of(&p.x)).collect();
    let max_scale = scales.iter().copied().fold(1.0, f64::max);
    let nudge = 4.0 * MEMBERSHIP_TOL * max_scale;
    let tilt = 8.0 * MEMBERSHIP_TOL * max_scale;

    let mut best: Option<Best> = None;

    // constants: everything inside, everything outside
    let mut e1 = vec![0.0; dim];
    e1[0] = 1.0;
    let lo = sample.iter().map(|p| p.x[0]).fold(f64::INFINITY, f64::min);
    let hi = sample.iter().map(|p| p.x[0]).fold(f64::NEG_INFINITY, f64::max);
    for offset in [lo - 1.0 - nudge, hi + 1.0 + nudge] {
        let h = Halfspace::new(e1.clone(), offset)?;
        let c = count(&h, sample);
        Best::offer(&mut best, c, || Some(h));
    }

    let mut dots = vec![0.0; n];
    let mut subset: Vec<&[f64]> = Vec::with_capacity(dim);
    for size in 1..=dim.min(n) {
        let mut combos = Combinations::new(n, size);
        while let Some(idx) = combos.next_combination() {
            subset.clear();
            subset.extend(idx.iter().map(|&i| sample[i].x.as_slice()));
            let Ok((h, _)) = supporting_halfspace_pair(&subset, dim) else {
                continue;
            };
            let w = h.normal();
            let w0 = h.offset();
            for (d, p) in dots.iter_mut().zip(sample) {
                *d = w.iter().zip(&p.x).map(|(a, b)| a * b).sum();
            }
            let boundary: Vec<usize> = (0..n)
                .filter(|&i| (dots[i] - w0).abs() <= MEMBERSHIP_TOL * scales[i])
                .collect();

            for orient in [1.0, -1.0] {
                // all-in and all-out nudges; -dot(w, x) == dot(-w, x) exactly
                for shift in [-nudge, nudge] {
                    let offset = orient * w0 + shift;
                    let mistakes = (0..n)
                        .filter(|&i| member_from_dot(orient * dots[i], offset, scales[i]) != sample[i].y)
                        .count() as u64;
                    Best::offer(&mut best, mistakes, || {
                        let normal: Vec<f64> = w.iter().map(|c| orient * c).collect();
                        Halfspace::new(normal, offset).ok().map(|h| h.with_source(idx.to_vec()))
                    });
                }

                let mixed = size >= 2
                    && boundary.as_slice() == idx
                    && idx.iter().any(|&i| sample[i].y)
                    && idx.iter().any(|&i| !sample[i].y);
                if mixed {
                    let normal: Vec<f64> = w.iter().map(|c| orient * c).collect();
                    let sides: Vec<f64> = idx.iter().map(|&i| if sample[i].y { 1.0 } else { -1.0 }).collect();
                    if let Some(t) = perturb(&normal, orient * w0, &subset, &sides, tilt) {
                        let c = count(&t, sample);
                        Best::offer(&mut best, c, || Some(t.with_source(idx.to_vec())));
                    }
                }
            }
        }
    }
    let best = best.expect("constant candidates always exist");
    Ok((best.halfspace, ErrorCount::new(best.mistakes, n as u64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1(v: &[(f64, bool)]) -> Vec<LabeledPoint> {
        v.iter().map(|&(x, y)| LabeledPoint::new(vec![x], y)).collect()
    }

    #[test]
    fn threshold_on_the_line() {
        let (h, e) = erm_halfspace(&s1(&[(0.0, false), (1.0, true), (2.0, true)]), 1).unwrap();
        assert_eq!(e, ErrorCount::new(0, 3));
        assert!(h.normal()[0] > 0.0);
        assert!(h.offset() > 0.0 && h.offset() <= 1.0 + 1e-6);
    }

    #[test]
    fn all_ones_uses_constant() {
        let (h, e) = erm_halfspace(&s1(&[(0.0, true), (5.0, true), (-3.0, true)]), 1).unwrap();
        assert_eq!(e.mistakes, 0);
        assert!(h.contains(&[100.0]) || h.contains(&[-100.0]));
    }

    #[test]
    fn empty_sample_rejected() {
        assert_eq!(erm_halfspace(&[], 2), Err(Error::EmptySample));
    }

    #[test]
    fn mixed_boundary_pattern_in_plane() {
        // a separable configuration whose only separators pass between a
        // labeled-1 and labeled-0 point pair lying on a common line
        let s = vec![
            LabeledPoint::new(vec![0.0, 0.0], true),
            LabeledPoint::new(vec![1.0, 0.0], false),
            LabeledPoint::new(vec![0.0, 1.0], true),
            LabeledPoint::new(vec![1.0, 1.0], false),
        ];
        let (h, e) = erm_halfspace(&s, 2).unwrap();
        assert_eq!(e.mistakes, 0);
        assert_eq!(count(&h, &s), 0);
    }

    #[test]
    fn reported_count_matches_returned_halfspace() {
        let s = vec![
            LabeledPoint::new(vec![0.3, -0.2], true),
            LabeledPoint::new(vec![-1.0, 0.4], false),
            LabeledPoint::new(vec![0.9, 1.1], false),
            LabeledPoint::new(vec![-0.2, -0.7], true),
            LabeledPoint::new(vec![0.5, 0.5], true),
            LabeledPoint::new(vec![-0.6, -0.1], false),
        ];
        let (h, e) = erm_halfspace(&s, 2).unwrap();
        assert_eq!(e.mistakes, count(&h, &s));
    }
}
