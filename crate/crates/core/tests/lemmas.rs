use ppm_core::data::{generate, GeneratorSpec};
use ppm_core::learner::{
    best_in_class, enumerate_class, erm_halfspace, learn_half, predict, HalfspaceFamily, LearnOptions,
};
use ppm_core::model::{partition, Example, PpmDataset, Privacy};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64) -> PpmDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 1 + (seed % 3) as usize;
    let n = match d {
        1 => rng.random_range(2..=24),
        2 => rng.random_range(2..=18),
        _ => rng.random_range(2..=10),
    };
    let eta = if rng.random_bool(0.5) { 0.0 } else { 0.2 };
    generate(&GeneratorSpec::new(d, seed).with_noise(eta), n).unwrap()
}

#[test]
fn best_in_class_dominates_erm_and_keeps_correct_points() {
    for seed in 0..45 {
        let ds = instance(seed);
        let part = partition(&ds);
        let family = HalfspaceFamily::from_dataset(&ds, None);
        let class = enumerate_class(&family, ds.dim());
        let (g, best) = best_in_class(&class, &part.all).unwrap();
        let (h, erm) = erm_halfspace(&part.all, ds.dim()).unwrap();
        assert!(best.mistakes <= erm.mistakes, "seed {seed}: {best} > {erm}");

        let erm_wrong: Vec<bool> = part.all.iter().map(|p| h.contains(&p.x) != p.y).collect();
        let preserving = class.iter().any(|g| {
            part.all
                .iter()
                .zip(&erm_wrong)
                .all(|(p, &wrong)| wrong || predict(&g, &family, &p.x).unwrap() == p.y)
        });
        assert!(preserving, "seed {seed}");

        // second exhaustive pass in shuffled order
        let mut all: Vec<_> = class.iter().collect();
        all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let min = all
            .iter()
            .map(|g| part.all.iter().filter(|p| predict(g, &family, &p.x).unwrap() != p.y).count())
            .min()
            .unwrap();
        assert_eq!(min as u64, best.mistakes);
        let direct = part.all.iter().filter(|p| predict(&g, &family, &p.x).unwrap() != p.y).count();
        assert_eq!(direct as u64, best.mistakes);
    }
}

fn bits(f: &HalfspaceFamily) -> Vec<u64> {
    let mut out: Vec<u64> = f
        .halfspaces()
        .iter()
        .flat_map(|h| h.normal().iter().chain([h.offset()].iter()).map(|v| v.to_bits()).collect::<Vec<_>>())
        .collect();
    out.extend(f.aff().base().iter().map(|v| v.to_bits()));
    out.extend(f.aff().basis().iter().flatten().map(|v| v.to_bits()));
    out
}

#[test]
fn construction_ignores_private_entries() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for seed in 0..30 {
        let ds = generate(&GeneratorSpec::new(1 + (seed % 2) as usize, seed).with_privacy_flip(0.3), 14).unwrap();
        let other: Vec<Example> = ds
            .examples()
            .iter()
            .map(|e| match e.privacy {
                Privacy::Public => e.clone(),
                Privacy::Private => Example::new(
                    (0..ds.dim()).map(|_| rng.random_range(-5.0..5.0)).collect(),
                    rng.random_bool(0.5),
                    Privacy::Private,
                ),
            })
            .collect();
        let other = PpmDataset::new(ds.dim(), other).unwrap();
        let (fa, fb) = (HalfspaceFamily::from_dataset(&ds, None), HalfspaceFamily::from_dataset(&other, None));
        assert_eq!(bits(&fa), bits(&fb));
        assert_eq!(fa, fb);
        let (ca, cb) = (enumerate_class(&fa, ds.dim()), enumerate_class(&fb, ds.dim()));
        assert_eq!(ca.cardinality(), cb.cardinality());
        assert!(ca.iter().eq(cb.iter()));
    }
}

#[test]
fn all_private_learns_everything_one() {
    for seed in 0..20 {
        let ds = generate(&GeneratorSpec::new(2, seed), 12).unwrap();
        let all_private: Vec<Example> =
            ds.examples().iter().map(|e| Example::new(e.x.clone(), e.y, Privacy::Private)).collect();
        let ds = PpmDataset::new(2, all_private).unwrap();
        let out = learn_half(&ds, 1.0, &LearnOptions::default(), seed).unwrap();
        assert!(out.family.is_empty());
        assert_eq!(out.diagnostics.class_size, 1);
        assert!(predict(&out.hypothesis, &out.family, &[7.0, -7.0]).unwrap());
    }
}
