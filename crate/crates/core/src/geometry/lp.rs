//! Low-dimensional LP feasibility by randomized incremental construction.
//!
//! Constraints are inserted in a seeded random order while a feasible point
//! is maintained. When a new constraint is violated, any feasible point of
//! the enlarged system must lie on that constraint's bounding hyperplane,
//! so the problem is solved recursively one dimension down on it.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{dot, norm, AffineSubspace, Halfspace, LP_SLACK};

const LP_SEED: u64 = 0x005e_ed1b;
const ZERO_COEF: f64 = 1e-12;

/// Outcome of [`region_feasible`].
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// A point of `aff` satisfying every constraint (within slack).
    Feasible(Vec<f64>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[f64]> {
        match self {
            Feasibility::Feasible(x) => Some(x),
            Feasibility::Infeasible => None,
        }
    }
}

/// A constraint `a . z >= b` in chart coordinates.
#[derive(Debug, Clone)]
struct Row {
    a: Vec<f64>,
    b: f64,
}

/// Decides whether `aff` meets every halfspace in `halfspaces`.
///
/// Constraints are relaxed by `LP_SLACK * (1 + |w0|)` so that touching
/// regions count as feasible. The empty list is feasible with witness
/// `aff.base()`.
pub fn region_feasible(halfspaces: &[&Halfspace], aff: &AffineSubspace) -> Feasibility {
    let u = aff.base();
    let rows: Vec<Row> = halfspaces
        .iter()
        .map(|h| {
            let a: Vec<f64> = aff.basis().iter().map(|b| dot(h.normal(), b)).collect();
            let b = h.offset() - dot(h.normal(), u) - LP_SLACK * (1.0 + h.offset().abs());
            Row { a, b }
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(LP_SEED);
    match solve(&rows, aff.dim(), &mut rng) {
        Some(z) => Feasibility::Feasible(aff.from_chart(&z)),
        None => Feasibility::Infeasible,
    }
}

fn satisfied(row: &Row, z: &[f64]) -> bool {
    dot(&row.a, z) >= row.b
}

fn solve(rows: &[Row], k: usize, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.shuffle(rng);
    let mut z = vec![0.0; k];
    for pos in 0..order.len() {
        let row = &rows[order[pos]];
        if satisfied(row, &z) {
            continue;
        }
        if k == 0 || norm(&row.a) <= ZERO_COEF {
            return None;
        }
        // eliminate the coordinate with the largest coefficient
        let j = (0..k)
            .max_by(|&p, &q| row.a[p].abs().total_cmp(&row.a[q].abs()))
            .unwrap();
        let aj = row.a[j];
        let projected: Vec<Row> = order[..pos]
            .iter()
            .map(|&i| {
                let prev = &rows[i];
                let f = prev.a[j] / aj;
                let a: Vec<f64> = (0..k)
                    .filter(|&l| l != j)
                    .map(|l| {
                        let c = prev.a[l] - f * row.a[l];
                        if c.abs() <= ZERO_COEF * (1.0 + prev.a[l].abs()) {
                            0.0
                        } else {
                            c
                        }
                    })
                    .collect();
                Row {
                    a,
                    b: prev.b - f * row.b,
                }
            })
            .collect();
        let y = solve(&projected, k - 1, rng)?;
        let mut rest = 0.0;
        let mut full = Vec::with_capacity(k);
        let mut it = y.iter();
        for l in 0..k {
            if l == j {
                full.push(0.0);
            } else {
                let v = *it.next().unwrap();
                rest += row.a[l] * v;
                full.push(v);
            }
        }
        full[j] = (row.b - rest) / aj;
        z = full;
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(w: &[f64], w0: f64) -> Halfspace {
        Halfspace::new(w.to_vec(), w0).unwrap()
    }

    #[test]
    fn interval_feasible() {
        let a = hs(&[1.0], 0.0);
        let b = hs(&[-1.0], -1.0);
        let f = region_feasible(&[&a, &b], &AffineSubspace::full(1));
        let x = f.witness().unwrap()[0];
        assert!((-1e-9..=1.0 + 1e-9).contains(&x));
    }

    #[test]
    fn crossed_interval_infeasible() {
        let a = hs(&[1.0], 1.0);
        let b = hs(&[-1.0], 0.0);
        assert_eq!(region_feasible(&[&a, &b], &AffineSubspace::full(1)), Feasibility::Infeasible);
    }

    #[test]
    fn empty_list_is_feasible_at_base() {
        let aff = AffineSubspace::full(2);
        assert_eq!(region_feasible(&[], &aff), Feasibility::Feasible(vec![0.0, 0.0]));
    }

    #[test]
    fn lower_dimensional_chart() {
        // line y = 1 in R^2 against y <= 0.5
        let aff = super::super::affine_span(&[[0.0, 1.0], [1.0, 1.0]], 2).unwrap();
        let below = hs(&[0.0, -1.0], -0.5);
        assert!(!region_feasible(&[&below], &aff).is_feasible());
        let right = hs(&[1.0, 0.0], 3.0);
        let w = region_feasible(&[&right], &aff);
        let x = w.witness().unwrap();
        assert!(right.contains(x) && aff.contains(x));
    }

    #[test]
    fn triangle_and_separated_target() {
        let tri = [hs(&[1.0, 0.0], 0.0), hs(&[0.0, 1.0], 0.0), hs(&[-1.0, -1.0], -1.0)];
        let far = hs(&[1.0, 1.0], 3.0);
        let mut all: Vec<&Halfspace> = tri.iter().collect();
        assert!(region_feasible(&all, &AffineSubspace::full(2)).is_feasible());
        all.push(&far);
        assert!(!region_feasible(&all, &AffineSubspace::full(2)).is_feasible());
    }
}
