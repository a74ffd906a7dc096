use ppm_core::geometry::{
    affine_span, helly_witness, hull_facet_halfspaces, region_feasible, AffineSubspace, Halfspace, LP_SLACK,
};
use ppm_oracles::{feasible_by_vertices, Constraint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn constraint(h: &Halfspace) -> Constraint {
    Constraint::new(h.normal().to_vec(), h.offset())
}

/// Aff as a pair of opposite constraints per normal direction.
fn aff_constraints(aff: &AffineSubspace) -> Vec<Constraint> {
    let d = aff.ambient_dim();
    let mut out = Vec::new();
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        // project e_j off the basis to get a normal direction
        for b in aff.basis() {
            let c: f64 = b.iter().zip(&e).map(|(p, q)| p * q).sum();
            for (ei, bi) in e.iter_mut().zip(b) {
                *ei -= c * bi;
            }
        }
        let n: f64 = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-6 {
            let e: Vec<f64> = e.iter().map(|v| v / n).collect();
            let off: f64 = e.iter().zip(aff.base()).map(|(p, q)| p * q).sum();
            out.push(Constraint::new(e.iter().map(|v| -v).collect(), -off));
            out.push(Constraint::new(e, off));
        }
    }
    out
}

fn oracle(hs: &[&Halfspace], aff: Option<&AffineSubspace>, dim: usize) -> bool {
    let mut cs: Vec<Constraint> = hs.iter().map(|h| constraint(h)).collect();
    if let Some(a) = aff {
        cs.extend(aff_constraints(a));
    }
    feasible_by_vertices(&cs, dim, 1e4, LP_SLACK)
}

fn random_halfspace(rng: &mut ChaCha8Rng, d: usize) -> Halfspace {
    loop {
        let w: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        if let Ok(h) = Halfspace::new(w, rng.random_range(-1.0..1.0)) {
            return h;
        }
    }
}

#[test]
fn lp_agrees_with_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen = [0usize; 2];
    for d in 1..=3 {
        for _ in 0..300 {
            let m = rng.random_range(1..=7);
            let hs: Vec<Halfspace> = (0..m).map(|_| random_halfspace(&mut rng, d)).collect();
            let refs: Vec<&Halfspace> = hs.iter().collect();
            let full = AffineSubspace::full(d);
            let f = region_feasible(&refs, &full);
            let expected = oracle(&refs, None, d);
            assert_eq!(f.is_feasible(), expected, "d={d} {hs:?}");
            seen[usize::from(expected)] += 1;
            if let Some(x) = f.witness() {
                assert!(hs.iter().all(|h| h.signed_gap(x) >= -1e-6));
            }
        }
    }
    assert!(seen[0] > 50 && seen[1] > 50, "{seen:?}");
}

#[test]
fn lp_agrees_on_low_dimensional_charts() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let pts: Vec<Vec<f64>> = (0..2).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let aff = affine_span(&pts, 3).unwrap();
        assert_eq!(aff.dim(), 1);
        let hs: Vec<Halfspace> = (0..rng.random_range(1..=4)).map(|_| random_halfspace(&mut rng, 3)).collect();
        let refs: Vec<&Halfspace> = hs.iter().collect();
        assert_eq!(region_feasible(&refs, &aff).is_feasible(), oracle(&refs, Some(&aff), 3));
    }
}

#[test]
fn helly_witnesses_for_disjoint_hulls() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut found = 0;
    while found < 60 {
        let k = rng.random_range(1..=8);
        let pts: Vec<Vec<f64>> = (0..k).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
        let aff = affine_span(&pts, 2).unwrap();
        let fam = hull_facet_halfspaces(&pts, &aff);
        let target = random_halfspace(&mut rng, 2);
        let mut all: Vec<&Halfspace> = fam.iter().collect();
        all.push(&target);
        if region_feasible(&all, &aff).is_feasible() {
            continue;
        }
        assert!(!oracle(&all, Some(&aff), 2));
        found += 1;
        let w = helly_witness(&fam, &aff, &target, 2).unwrap();
        assert!(w.size() <= 2);
        let mut t: Vec<&Halfspace> = w.members.iter().map(|&i| &fam[i]).collect();
        t.push(&target);
        assert!(!oracle(&t, w.includes_aff.then_some(&aff), 2), "{w:?}");
    }
}
