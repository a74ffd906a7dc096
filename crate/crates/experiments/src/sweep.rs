use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use ppm_core::data::{generate, generate_holdout};
use ppm_core::learner::{erm_halfspace, learn_half, predict, LearnOptions};
use ppm_core::model::partition;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Cell, SweepConfig};
use crate::error::{Error, Result};
use crate::report::{summarize, CellSummary};
use crate::seeds::derive_seed;

pub const RECORDS_FILE: &str = "records.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const REPORT_FILE: &str = "report.json";
pub const JOURNAL_FILE: &str = "journal.jsonl";

/// One seeded run of the learner on a fresh dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub config_hash: String,
    pub cell: usize,
    pub trial: usize,
    pub seed: u64,
    pub dim: usize,
    pub n: usize,
    pub epsilon: f64,
    pub label_noise: f64,
    pub pool_cap: Option<usize>,
    pub n_public: usize,
    pub family_size: usize,
    pub class_size: u128,
    pub selected_index: u64,
    pub selected_mistakes: u64,
    pub best_mistakes: u64,
    pub erm_mistakes: Option<u64>,
    pub holdout_size: usize,
    pub holdout_mistakes: u64,
    /// Wall time is kept out of the CSV so that it stays byte-identical.
    #[serde(default)]
    pub wall_ms: f64,
}

const COLUMNS: [&str; 20] = [
    "config_hash",
    "cell",
    "trial",
    "seed",
    "dim",
    "n",
    "epsilon",
    "label_noise",
    "pool_cap",
    "n_public",
    "family_size",
    "class_size",
    "selected_index",
    "selected_mistakes",
    "best_mistakes",
    "erm_mistakes",
    "empirical_error",
    "holdout_size",
    "holdout_mistakes",
    "holdout_error",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

impl TrialRecord {
    /// `selected_mistakes / n`.
    pub fn empirical_error(&self) -> f64 {
        self.selected_mistakes as f64 / self.n as f64
    }

    pub fn holdout_error(&self) -> f64 {
        if self.holdout_size == 0 {
            return f64::NAN;
        }
        self.holdout_mistakes as f64 / self.holdout_size as f64
    }

    /// Excess over the generator optimum `η`.
    pub fn excess_holdout_error(&self) -> f64 {
        self.holdout_error() - self.label_noise
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.config_hash.clone(),
            self.cell.to_string(),
            self.trial.to_string(),
            self.seed.to_string(),
            self.dim.to_string(),
            self.n.to_string(),
            self.epsilon.to_string(),
            self.label_noise.to_string(),
            opt(self.pool_cap),
            self.n_public.to_string(),
            self.family_size.to_string(),
            self.class_size.to_string(),
            self.selected_index.to_string(),
            self.selected_mistakes.to_string(),
            self.best_mistakes.to_string(),
            opt(self.erm_mistakes),
            format!("{}/{}", self.selected_mistakes, self.n),
            self.holdout_size.to_string(),
            self.holdout_mistakes.to_string(),
            self.holdout_error().to_string(),
        ]
    }

    fn from_fields(row: &csv::StringRecord) -> Result<Self> {
        if row.len() != COLUMNS.len() {
            return Err(Error::Records(format!("expected {} columns, got {}", COLUMNS.len(), row.len())));
        }
        fn p<T: std::str::FromStr>(s: &str, name: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Records(format!("bad {name}: {s:?}")))
        }
        fn po<T: std::str::FromStr>(s: &str, name: &str) -> Result<Option<T>> {
            if s.is_empty() {
                Ok(None)
            } else {
                p(s, name).map(Some)
            }
        }
        Ok(Self {
            config_hash: row[0].to_string(),
            cell: p(&row[1], "cell")?,
            trial: p(&row[2], "trial")?,
            seed: p(&row[3], "seed")?,
            dim: p(&row[4], "dim")?,
            n: p(&row[5], "n")?,
            epsilon: p(&row[6], "epsilon")?,
            label_noise: p(&row[7], "label_noise")?,
            pool_cap: po(&row[8], "pool_cap")?,
            n_public: p(&row[9], "n_public")?,
            family_size: p(&row[10], "family_size")?,
            class_size: p(&row[11], "class_size")?,
            selected_index: p(&row[12], "selected_index")?,
            selected_mistakes: p(&row[13], "selected_mistakes")?,
            best_mistakes: p(&row[14], "best_mistakes")?,
            erm_mistakes: po(&row[15], "erm_mistakes")?,
            holdout_size: p(&row[17], "holdout_size")?,
            holdout_mistakes: p(&row[18], "holdout_mistakes")?,
            wall_ms: 0.0,
        })
    }
}

pub fn write_records<W: Write>(records: &[TrialRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: std::io::Read>(reader: R) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let head = r.headers()?.clone();
    if head.iter().ne(COLUMNS) {
        return Err(Error::Records("unexpected records header".into()));
    }
    r.records().map(|row| TrialRecord::from_fields(&row?)).collect()
}

/// Runs trial `trial` of `cell`; a pure function of the config and indices.
pub fn run_trial(config: &SweepConfig, cell: &Cell, trial: usize) -> Result<TrialRecord> {
    let start = Instant::now();
    let seed = derive_seed(config.seed, cell.index as u64, trial as u64);
    let cell_err = |source| Error::Cell {
        n: cell.n,
        epsilon: cell.epsilon,
        source,
    };
    let spec = config.generator.spec(seed)?;
    let dataset = generate(&spec, cell.n).map_err(cell_err)?;
    let options = LearnOptions {
        pool_cap: config.pool_cap,
        budget: config.budget as u128,
        sampling: config.sampling,
        ..LearnOptions::default()
    };
    let outcome = learn_half(&dataset, cell.epsilon, &options, derive_seed(seed, 1, 0)).map_err(cell_err)?;
    let erm_mistakes = if config.erm {
        let part = partition(&dataset);
        Some(erm_halfspace(&part.all, dataset.dim()).map_err(cell_err)?.1.mistakes)
    } else {
        None
    };
    let holdout = generate_holdout(&spec, config.holdout).map_err(cell_err)?;
    let mut holdout_mistakes = 0;
    for p in &holdout {
        if predict(&outcome.hypothesis, &outcome.family, &p.x).map_err(cell_err)? != p.y {
            holdout_mistakes += 1;
        }
    }
    let d = &outcome.diagnostics;
    Ok(TrialRecord {
        config_hash: config.hash(),
        cell: cell.index,
        trial,
        seed,
        dim: dataset.dim(),
        n: cell.n,
        epsilon: cell.epsilon,
        label_noise: config.generator.label_noise,
        pool_cap: config.pool_cap,
        n_public: d.n_public,
        family_size: d.family_size,
        class_size: d.class_size,
        selected_index: d.selected_index,
        selected_mistakes: d.selected_error.mistakes,
        best_mistakes: d.best_error.mistakes,
        erm_mistakes,
        holdout_size: holdout.len(),
        holdout_mistakes,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Trials of one cell, run in parallel and returned in trial order.
pub fn run_cell(config: &SweepConfig, cell: &Cell) -> Result<Vec<TrialRecord>> {
    (0..config.trials).into_par_iter().map(|t| run_trial(config, cell, t)).collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct JournalEntry {
    config_hash: String,
    cell: usize,
    records: Vec<TrialRecord>,
}

/// Completed cells from a journal; a torn final line is ignored.
fn read_journal(path: &Path, hash: &str) -> BTreeMap<usize, Vec<TrialRecord>> {
    let mut done = BTreeMap::new();
    let Ok(file) = File::open(path) else {
        return done;
    };
    for line in BufReader::new(file).lines() {
        let Ok(line) = line else { break };
        match serde_json::from_str::<JournalEntry>(&line) {
            Ok(e) if e.config_hash == hash => {
                done.insert(e.cell, e.records);
            }
            Ok(_) => {}
            Err(_) => break,
        }
    }
    done
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub config_hash: String,
    pub notes: Vec<String>,
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<CellSummary>,
}

pub const REPORT_NOTES: [&str; 2] = [
    "excess error is measured against the generator optimum (0 when noiseless, the label noise rate otherwise)",
    "bound constants are reported with each value; the underlying statements fix them only up to O(.)",
];

/// Runs every cell, resuming from `out/journal.jsonl` when present, and
/// writes `records.csv`, `summary.csv` and `report.json` under `out`.
pub fn run_sweep(config: &SweepConfig, out: Option<&Path>) -> Result<SweepReport> {
    config.validate()?;
    let hash = config.hash();
    let journal_path: Option<PathBuf> = out.map(|o| o.join(JOURNAL_FILE));
    if let Some(o) = out {
        fs::create_dir_all(o)?;
    }
    let mut done = journal_path.as_deref().map(|p| read_journal(p, &hash)).unwrap_or_default();
    let mut journal = match &journal_path {
        Some(p) => Some(OpenOptions::new().create(true).append(true).open(p)?),
        None => None,
    };
    let mut records = Vec::new();
    for cell in config.cells() {
        let cell_records = match done.remove(&cell.index) {
            Some(r) if r.len() == config.trials => {
                log::info!("cell {} restored from journal", cell.index);
                r
            }
            _ => {
                let r = run_cell(config, &cell)?;
                if let Some(j) = journal.as_mut() {
                    let entry = JournalEntry {
                        config_hash: hash.clone(),
                        cell: cell.index,
                        records: r.clone(),
                    };
                    writeln!(j, "{}", serde_json::to_string(&entry)?)?;
                    j.flush()?;
                }
                r
            }
        };
        records.extend(cell_records);
    }
    let summaries = summarize(&records, 1.0, 0.05);
    let report = SweepReport {
        config: config.clone(),
        config_hash: hash,
        notes: REPORT_NOTES.iter().map(|s| s.to_string()).collect(),
        records,
        summaries,
    };
    if let Some(o) = out {
        write_records(&report.records, File::create(o.join(RECORDS_FILE))?)?;
        crate::report::write_summaries(&report.summaries, File::create(o.join(SUMMARY_FILE))?)?;
        serde_json::to_writer_pretty(File::create(o.join(REPORT_FILE))?, &report)?;
    }
    Ok(report)
}
