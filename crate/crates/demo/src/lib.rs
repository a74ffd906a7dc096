//! Browser bindings for three interactive views of the private learner:
//! a planar run with its decision region, the selection distribution over
//! mistake levels as ε varies, and the sample-size bounds as curves.
//!
//! Every entry point returns JSON so the page needs no generated bindings
//! beyond strings. The plain functions are the testable core; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use ppm_core::bounds::{agnostic_sample_bound, implied_alpha, realizable_sample_bound, BoundKind};
use ppm_core::data::{generate, GeneratorSpec};
use ppm_core::learner::{learn_half, predict, LearnOptions};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Half-width of the square the planar view rasterizes.
pub const VIEW_RADIUS: f64 = 3.0;
/// Cap on the public pool so that the class stays interactive.
pub const DEMO_POOL_CAP: usize = 24;

#[derive(Debug, Serialize)]
struct PlotPoint {
    x: f64,
    y: f64,
    label: bool,
    private: bool,
}

#[derive(Debug, Serialize)]
struct PlaneRun {
    points: Vec<PlotPoint>,
    /// Row-major labels over a `resolution²` grid on `[-r, r]²`, top row first.
    grid: Vec<u8>,
    resolution: usize,
    radius: f64,
    members: Vec<(Vec<f64>, f64)>,
    family_size: usize,
    class_size: String,
    selected_mistakes: u64,
    best_mistakes: u64,
    n: usize,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Generates a planar dataset, runs the learner and rasterizes the result.
pub fn plane_run(n: usize, epsilon: f64, noise: f64, flip: f64, seed: u64, resolution: usize) -> Result<String, String> {
    if !(8..=400).contains(&resolution) {
        return Err("resolution must be in 8..=400".into());
    }
    let spec = GeneratorSpec::new(2, seed).with_noise(noise).with_privacy_flip(flip);
    let ds = generate(&spec, n).map_err(err)?;
    let opts = LearnOptions::default().with_pool_cap(Some(DEMO_POOL_CAP));
    let out = learn_half(&ds, epsilon, &opts, seed).map_err(err)?;
    let step = 2.0 * VIEW_RADIUS / resolution as f64;
    let mut grid = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        let y = VIEW_RADIUS - (row as f64 + 0.5) * step;
        for col in 0..resolution {
            let x = -VIEW_RADIUS + (col as f64 + 0.5) * step;
            grid.push(u8::from(predict(&out.hypothesis, &out.family, &[x, y]).map_err(err)?));
        }
    }
    let members = out
        .hypothesis
        .members()
        .iter()
        .map(|&i| {
            let h = &out.family.halfspaces()[i];
            (h.normal().to_vec(), h.offset())
        })
        .collect();
    let d = &out.diagnostics;
    let run = PlaneRun {
        points: ds
            .examples()
            .iter()
            .map(|e| PlotPoint {
                x: e.x[0],
                y: e.x[1],
                label: e.y,
                private: e.is_private(),
            })
            .collect(),
        grid,
        resolution,
        radius: VIEW_RADIUS,
        members,
        family_size: d.family_size,
        class_size: d.class_size.to_string(),
        selected_mistakes: d.selected_error.mistakes,
        best_mistakes: d.best_error.mistakes,
        n: d.n,
    };
    serde_json::to_string(&run).map_err(err)
}

#[derive(Debug, Serialize)]
struct Level {
    mistakes: usize,
    hypotheses: u64,
    /// Total selection probability of the level.
    mass: f64,
}

#[derive(Debug, Serialize)]
struct SelectionProfile {
    epsilon: f64,
    n: usize,
    class_size: String,
    levels: Vec<Level>,
    expected_excess: f64,
}

/// Selection mass per mistake level for a one-dimensional dataset.
///
/// The histogram does not depend on ε, so the page can redraw the profile
/// for any ε from the same seed.
pub fn selection_profile(n: usize, noise: f64, epsilon: f64, seed: u64) -> Result<String, String> {
    let spec = GeneratorSpec::new(1, seed).with_noise(noise);
    let ds = generate(&spec, n).map_err(err)?;
    let out = learn_half(&ds, epsilon, &LearnOptions::default(), seed).map_err(err)?;
    let hist = &out.diagnostics.histogram;
    let log_z = hist.log_normalizer(epsilon);
    let kmin = hist.min_mistakes().unwrap_or(0) as f64;
    let levels: Vec<Level> = hist
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| Level {
            mistakes: k,
            hypotheses: c,
            mass: ((c as f64).ln() - epsilon * k as f64 / 2.0 - log_z).exp(),
        })
        .collect();
    let expected_excess = levels.iter().map(|l| l.mass * (l.mistakes as f64 - kmin)).sum();
    let profile = SelectionProfile {
        epsilon,
        n,
        class_size: out.diagnostics.class_size.to_string(),
        levels,
        expected_excess,
    };
    serde_json::to_string(&profile).map_err(err)
}

#[derive(Debug, Serialize)]
struct BoundCurve {
    kind: String,
    alphas: Vec<f64>,
    samples: Vec<Option<f64>>,
    /// `α` achievable at each of `ns`.
    ns: Vec<f64>,
    implied_alphas: Vec<Option<f64>>,
}

/// Sample-size bound over a log grid of `α`, plus the achievable `α` over
/// a log grid of `n`.
pub fn bound_curve(agnostic: bool, dim: usize, epsilon: f64, beta: f64, c: f64) -> Result<String, String> {
    let kind = if agnostic {
        BoundKind::Agnostic
    } else {
        BoundKind::Realizable
    };
    let bound = |alpha| match kind {
        BoundKind::Agnostic => agnostic_sample_bound(dim, epsilon, alpha, beta, c),
        _ => realizable_sample_bound(dim, epsilon, alpha, beta, c),
    };
    // surface parameter errors once, at a representative α
    bound(0.1).map_err(err)?;
    let alphas: Vec<f64> = (0..=40).map(|i| 10f64.powf(-3.0 + 3.0 * i as f64 / 40.0)).collect();
    let samples = alphas.iter().map(|&a| bound(a).ok().map(|r| r.value)).collect();
    let ns: Vec<f64> = (0..=40).map(|i| 10f64.powf(1.0 + 6.0 * i as f64 / 40.0)).collect();
    let implied_alphas = ns.iter().map(|&n| implied_alpha(kind, dim, epsilon, beta, c, n)).collect();
    serde_json::to_string(&BoundCurve {
        kind: kind.to_string(),
        alphas,
        samples,
        ns,
        implied_alphas,
    })
    .map_err(err)
}

#[wasm_bindgen(js_name = planeRun)]
pub fn plane_run_js(n: u32, epsilon: f64, noise: f64, flip: f64, seed: u32, resolution: u32) -> Result<String, JsError> {
    plane_run(n as usize, epsilon, noise, flip, seed.into(), resolution as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = selectionProfile)]
pub fn selection_profile_js(n: u32, noise: f64, epsilon: f64, seed: u32) -> Result<String, JsError> {
    selection_profile(n as usize, noise, epsilon, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = boundCurve)]
pub fn bound_curve_js(agnostic: bool, dim: u32, epsilon: f64, beta: f64, c: f64) -> Result<String, JsError> {
    bound_curve(agnostic, dim as usize, epsilon, beta, c).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn plane_run_is_seeded_and_shaped() {
        let a = plane_run(60, 1.0, 0.0, 0.1, 7, 20).unwrap();
        assert_eq!(a, plane_run(60, 1.0, 0.0, 0.1, 7, 20).unwrap());
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["grid"].as_array().unwrap().len(), 400);
        assert_eq!(v["points"].as_array().unwrap().len(), 60);
        assert!(v["best_mistakes"].as_u64() <= v["selected_mistakes"].as_u64());
        assert!(plane_run(60, 1.0, 0.0, 0.1, 7, 2).is_err());
        assert!(plane_run(60, -1.0, 0.0, 0.1, 7, 20).is_err());
    }

    #[test]
    fn profile_masses_sum_to_one_and_concentrate() {
        let mass = |eps: f64| {
            let v: Value = serde_json::from_str(&selection_profile(200, 0.1, eps, 3).unwrap()).unwrap();
            let levels = v["levels"].as_array().unwrap().clone();
            let total: f64 = levels.iter().map(|l| l["mass"].as_f64().unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-9);
            v["expected_excess"].as_f64().unwrap()
        };
        assert!(mass(5.0) < mass(0.5));
    }

    #[test]
    fn bound_curves_decrease() {
        let v: Value = serde_json::from_str(&bound_curve(false, 2, 1.0, 0.05, 1.0).unwrap()).unwrap();
        let s: Vec<f64> = v["samples"].as_array().unwrap().iter().filter_map(Value::as_f64).collect();
        assert!(s.windows(2).all(|w| w[1] <= w[0]));
        let a: Vec<f64> = v["implied_alphas"].as_array().unwrap().iter().filter_map(Value::as_f64).collect();
        assert!(a.windows(2).all(|w| w[1] <= w[0]));
        assert!(bound_curve(true, 0, 1.0, 0.05, 1.0).is_err());
    }
}
