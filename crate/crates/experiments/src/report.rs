use std::io::Write;

use ppm_core::bounds::{compression_bound, implied_alpha, mechanism_utility_bound, BoundKind};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sweep::TrialRecord;

/// Per-cell statistics with the bound overlay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: usize,
    pub dim: usize,
    pub n: usize,
    pub epsilon: f64,
    pub label_noise: f64,
    pub trials: usize,
    /// Generator optimum the excess is measured against.
    pub optimum: f64,
    pub median_holdout_error: f64,
    pub p10_holdout_error: f64,
    pub p90_holdout_error: f64,
    pub median_empirical_error: f64,
    pub median_excess_error: f64,
    pub median_class_size: f64,
    /// Utility bound of the selection at the median class size.
    pub utility_bound: Option<f64>,
    /// Compression deviation with `k = d²` at the median empirical error.
    pub compression_bound: Option<f64>,
    /// `α` at which the realizable (noiseless) or agnostic sample bound
    /// equals `n`.
    pub implied_alpha: Option<f64>,
    pub constant: f64,
    pub beta: f64,
    /// Median excess above `implied_alpha`.
    pub exceeds_bound: bool,
}

/// Percentile `q` in `[0, 1]` of sorted values, linearly interpolated.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Groups records by cell, in order of first appearance.
pub fn summarize(records: &[TrialRecord], constant: f64, beta: f64) -> Vec<CellSummary> {
    let mut cells: Vec<usize> = Vec::new();
    for r in records {
        if !cells.contains(&r.cell) {
            cells.push(r.cell);
        }
    }
    cells
        .into_iter()
        .map(|cell| {
            let rs: Vec<&TrialRecord> = records.iter().filter(|r| r.cell == cell).collect();
            let first = rs[0];
            let holdout = sorted(rs.iter().map(|r| r.holdout_error()));
            let empirical = sorted(rs.iter().map(|r| r.empirical_error()));
            let excess = sorted(rs.iter().map(|r| r.excess_holdout_error()));
            let class = sorted(rs.iter().map(|r| r.class_size as f64));
            let median_empirical = percentile(&empirical, 0.5);
            let median_class = percentile(&class, 0.5).max(1.0);
            let utility = mechanism_utility_bound(median_class.round() as u128, first.epsilon, first.n as u64, beta)
                .ok()
                .map(|b| b.value);
            let k = (first.dim * first.dim) as u64;
            let compression = compression_bound(k, first.n as u64, beta, median_empirical.clamp(0.0, 1.0))
                .ok()
                .map(|b| b.value);
            let kind = if first.label_noise == 0.0 {
                BoundKind::Realizable
            } else {
                BoundKind::Agnostic
            };
            let eps = first.epsilon.min(1.0);
            let alpha = implied_alpha(kind, first.dim, eps, beta, constant, first.n as f64);
            let median_excess = percentile(&excess, 0.5);
            CellSummary {
                cell,
                dim: first.dim,
                n: first.n,
                epsilon: first.epsilon,
                label_noise: first.label_noise,
                trials: rs.len(),
                optimum: first.label_noise,
                median_holdout_error: percentile(&holdout, 0.5),
                p10_holdout_error: percentile(&holdout, 0.1),
                p90_holdout_error: percentile(&holdout, 0.9),
                median_empirical_error: median_empirical,
                median_excess_error: median_excess,
                median_class_size: median_class,
                utility_bound: utility,
                compression_bound: compression,
                implied_alpha: alpha,
                constant,
                beta,
                exceeds_bound: alpha.is_some_and(|a| median_excess > a),
            }
        })
        .collect()
}

const SUMMARY_COLUMNS: [&str; 19] = [
    "cell",
    "dim",
    "n",
    "epsilon",
    "label_noise",
    "trials",
    "optimum",
    "median_holdout_error",
    "p10_holdout_error",
    "p90_holdout_error",
    "median_empirical_error",
    "median_excess_error",
    "median_class_size",
    "utility_bound",
    "compression_bound",
    "implied_alpha",
    "constant",
    "beta",
    "exceeds_bound",
];

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

pub fn write_summaries<W: Write>(summaries: &[CellSummary], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SUMMARY_COLUMNS)?;
    for s in summaries {
        w.write_record([
            s.cell.to_string(),
            s.dim.to_string(),
            s.n.to_string(),
            s.epsilon.to_string(),
            s.label_noise.to_string(),
            s.trials.to_string(),
            s.optimum.to_string(),
            s.median_holdout_error.to_string(),
            s.p10_holdout_error.to_string(),
            s.p90_holdout_error.to_string(),
            s.median_empirical_error.to_string(),
            s.median_excess_error.to_string(),
            s.median_class_size.to_string(),
            opt(s.utility_bound),
            opt(s.compression_bound),
            opt(s.implied_alpha),
            s.constant.to_string(),
            s.beta.to_string(),
            s.exceeds_bound.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
