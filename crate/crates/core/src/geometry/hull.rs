use super::{
    affine_span, dot, orthonormalize, supporting_pair_preferring, AffineSubspace, Halfspace,
    DEDUP_TOL,
};
use crate::combinations::Combinations;

/// Halfspaces whose intersection with `aff` is the convex hull of `points`.
///
/// Brute force: every `k`-subset of affinely independent points (with `k`
/// the dimension of the points' own span) yields a hyperplane inside that
/// span, kept in whichever orientation has every point on its closed side.
/// When the points span less than `aff`, opposite pairs through their span
/// cut `aff` down to it. `source` holds indices into `points`.
pub fn hull_facet_halfspaces<P: AsRef<[f64]>>(points: &[P], aff: &AffineSubspace) -> Vec<Halfspace> {
    let dim = aff.ambient_dim();
    let Ok(own) = affine_span(points, dim) else {
        return Vec::new();
    };
    let k = own.dim();
    let preferred: &[Vec<f64>] = if own.is_full() { &[] } else { own.basis() };
    let mut facets: Vec<Halfspace> = Vec::new();
    let push = |h: Halfspace, facets: &mut Vec<Halfspace>| {
        if !facets.iter().any(|f| f.approx_eq(&h, DEDUP_TOL)) {
            facets.push(h);
        }
    };

    if k >= 1 {
        let mut combos = Combinations::new(points.len(), k);
        while let Some(idx) = combos.next_combination() {
            let subset: Vec<&[f64]> = idx.iter().map(|&i| points[i].as_ref()).collect();
            match affine_span(&subset, dim) {
                Ok(s) if s.dim() + 1 == k => {}
                _ => continue,
            }
            let Ok((h, o)) = supporting_pair_preferring(&subset, dim, preferred) else {
                continue;
            };
            for cand in [h, o] {
                if points.iter().all(|p| cand.contains(p.as_ref())) {
                    push(cand.with_source(idx.to_vec()), &mut facets);
                    break;
                }
            }
        }
    }

    if aff.dim() > k {
        let support = spanning_indices(points, dim);
        let mut dirs: Vec<Vec<f64>> = own.basis().to_vec();
        let before = dirs.len();
        dirs.extend(aff.basis().iter().cloned());
        let complete = orthonormalize(&dirs, 1e-6);
        for n in &complete[before..] {
            let offset = dot(n, own.base());
            if let Ok(h) = Halfspace::new(n.clone(), offset) {
                let h = if h.has_canonical_sign() { h } else { h.opposite() };
                let o = h.opposite();
                push(h.with_source(support.clone()), &mut facets);
                push(o.with_source(support.clone()), &mut facets);
            }
        }
    }
    facets
}

/// Greedy selection of points that each raise the affine rank.
fn spanning_indices<P: AsRef<[f64]>>(points: &[P], dim: usize) -> Vec<usize> {
    let mut chosen = vec![0];
    let mut rank = 0;
    for i in 1..points.len() {
        let mut trial: Vec<&[f64]> = chosen.iter().map(|&j| points[j].as_ref()).collect();
        trial.push(points[i].as_ref());
        if let Ok(s) = affine_span(&trial, dim) {
            if s.dim() > rank {
                rank = s.dim();
                chosen.push(i);
            }
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::affine_span;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn triangle_has_three_facets() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let f = hull_facet_halfspaces(&pts, &AffineSubspace::full(2));
        assert_eq!(f.len(), 3);
        for h in &f {
            assert!(pts.iter().all(|p| h.contains(p)));
            assert!(pts.iter().filter(|p| h.on_boundary(*p)).count() >= 1);
        }
    }

    #[test]
    fn collinear_points_cut_at_extremes() {
        let pts = [[0.0, 0.0], [1.0, 1.0], [3.0, 3.0], [2.0, 2.0]];
        let aff = affine_span(&pts, 2).unwrap();
        let f = hull_facet_halfspaces(&pts, &aff);
        assert_eq!(f.len(), 2);
        let inside = |x: &[f64]| aff.contains(x) && f.iter().all(|h| h.contains(x));
        assert!(inside(&[1.5, 1.5]));
        assert!(!inside(&[-0.1, -0.1]));
        assert!(!inside(&[3.1, 3.1]));
    }

    #[test]
    fn single_point_pinned_in_full_space() {
        let f = hull_facet_halfspaces(&[[2.0, -1.0]], &AffineSubspace::full(2));
        assert_eq!(f.len(), 4);
        let inside = |x: &[f64]| f.iter().all(|h| h.contains(x));
        assert!(inside(&[2.0, -1.0]));
        assert!(!inside(&[2.0, -0.9]));
    }

    #[test]
    fn segment_inside_plane_is_cut_to_its_line() {
        let pts = [[0.0, 0.0], [2.0, 0.0]];
        let f = hull_facet_halfspaces(&pts, &AffineSubspace::full(2));
        let inside = |x: &[f64]| f.iter().all(|h| h.contains(x));
        assert!(inside(&[1.0, 0.0]));
        assert!(!inside(&[1.0, 0.1]));
        assert!(!inside(&[2.1, 0.0]));
    }

    fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    }

    /// Andrew's monotone chain; counter-clockwise, no collinear vertices.
    fn hull_oracle(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        let mut lower: Vec<[f64; 2]> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<[f64; 2]> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        lower
    }

    fn inside_oracle(hull: &[[f64; 2]], x: [f64; 2]) -> bool {
        (0..hull.len()).all(|i| cross(hull[i], hull[(i + 1) % hull.len()], x) >= 0.0)
    }

    #[test]
    fn random_planar_hulls_match_monotone_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let pts: Vec<[f64; 2]> = (0..8).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
            let f = hull_facet_halfspaces(&pts, &AffineSubspace::full(2));
            let hull = hull_oracle(pts.clone());
            assert_eq!(f.len(), hull.len());
            for p in &pts {
                assert!(f.iter().all(|h| h.contains(p)));
            }
            for _ in 0..200 {
                let x = [rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2)];
                let ours = f.iter().all(|h| h.contains(&x));
                let theirs = inside_oracle(&hull, x);
                // skip probes within tolerance of an edge
                let near = f.iter().any(|h| h.signed_gap(&x).abs() < 1e-7);
                if !near {
                    assert_eq!(ours, theirs, "probe {x:?}");
                }
            }
        }
    }
}
