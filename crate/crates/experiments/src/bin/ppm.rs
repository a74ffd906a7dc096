use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ppm_core::bounds::{
    agnostic_sample_bound, compression_bound, mechanism_utility_bound, realizable_sample_bound, BoundReport,
};
use ppm_core::data::{generate, read_csv_path, write_csv, GeneratorSpec, Marginal};
use ppm_core::learner::{erm_halfspace, learn_half, predict, LearnOptions, Sampling, DEFAULT_BUDGET};
use ppm_core::model::partition;
use ppm_core::privacy::{verify_dp, AuditOptions, AUDIT_BUDGET};
use ppm_experiments::report::write_summaries;
use ppm_experiments::{read_records, run_sweep, summarize, Error, SweepConfig};
use serde_json::json;

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Private-public mixture learning of halfspaces.
#[derive(Debug, Parser)]
#[command(name = "ppm", version)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sweep configuration (TOML, or JSON by extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file or directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Use only the first N public points to build the family.
    #[arg(long, global = true)]
    pool_cap: Option<usize>,
    /// Largest hypothesis class that may be scored.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SamplingArg {
    Exact,
    GumbelMax,
}

impl From<SamplingArg> for Sampling {
    fn from(s: SamplingArg) -> Self {
        match s {
            SamplingArg::Exact => Sampling::Exact,
            SamplingArg::GumbelMax => Sampling::GumbelMax,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic dataset as CSV.
    Gen {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        n: usize,
        /// Label flip rate.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Rate at which the privacy bit disagrees with the label.
        #[arg(long, default_value_t = 0.0)]
        flip: f64,
        /// gaussian, cube, or affine:K
        #[arg(long, default_value = "gaussian")]
        marginal: String,
    },
    /// Run the private learner on a dataset.
    Learn {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = SamplingArg::Exact)]
        sampling: SamplingArg,
        /// Dataset whose labels estimate the true error.
        #[arg(long)]
        holdout: Option<PathBuf>,
    },
    /// Minimum-error halfspace on a dataset, ignoring privacy.
    Erm {
        #[arg(long)]
        data: PathBuf,
    },
    /// Exact privacy audit over random single-entry neighbors.
    VerifyDp {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Evaluate the closed-form bounds.
    Bounds {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 0.05)]
        beta: f64,
        /// Leading constant of the sample bounds.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Sample size for the utility and compression bounds.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        class_size: Option<u128>,
        /// Compression size; defaults to dim².
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, default_value_t = 0.0)]
        emp_err: f64,
    },
    /// Run a configured sweep.
    Sweep,
    /// Per-cell statistics of a records file.
    Summarize {
        records: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 0.05)]
        beta: f64,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<ppm_core::Error> for Failure {
    fn from(e: ppm_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn parse_marginal(s: &str) -> Result<Marginal, Failure> {
    match s {
        "gaussian" => Ok(Marginal::Gaussian),
        "cube" => Ok(Marginal::UniformCube),
        _ => s
            .strip_prefix("affine:")
            .and_then(|k| k.parse().ok())
            .map(|k| Marginal::LowDimAffine { k })
            .ok_or_else(|| Failure::Usage(format!("unknown marginal {s:?}; use gaussian, cube or affine:K"))),
    }
}

/// Writes to `--out` when given, stdout otherwise.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn options(cli: &Cli) -> LearnOptions {
    LearnOptions::default()
        .with_pool_cap(cli.pool_cap)
        .with_budget(cli.budget.map_or(DEFAULT_BUDGET, u128::from))
}

fn bound_row(r: &BoundReport) -> String {
    let inputs: Vec<String> = r.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{:<12} {:>14.6} {:>6} {}\n", r.name.to_string(), r.value, r.constant, inputs.join(" "))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Gen {
            dim,
            n,
            noise,
            flip,
            marginal,
        } => {
            let spec = GeneratorSpec::new(*dim, seed)
                .with_noise(*noise)
                .with_privacy_flip(*flip)
                .with_marginal(parse_marginal(marginal)?);
            let ds = generate(&spec, *n)?;
            match &cli.out {
                Some(p) => write_csv(&ds, File::create(p)?)?,
                None => write_csv(&ds, io::stdout().lock())?,
            }
        }
        Command::Learn {
            data,
            epsilon,
            sampling,
            holdout,
        } => {
            let ds = read_csv_path(data)?;
            let mut opts = options(cli);
            opts.sampling = (*sampling).into();
            let out = learn_half(&ds, *epsilon, &opts, seed)?;
            let holdout_error = match holdout {
                Some(path) => {
                    let h = partition(&read_csv_path(path)?).all;
                    let mut wrong = 0usize;
                    for p in &h {
                        if predict(&out.hypothesis, &out.family, &p.x)? != p.y {
                            wrong += 1;
                        }
                    }
                    Some(wrong as f64 / h.len() as f64)
                }
                None => None,
            };
            let members: Vec<_> = out
                .hypothesis
                .members()
                .iter()
                .map(|&i| &out.family.halfspaces()[i])
                .collect();
            let d = &out.diagnostics;
            let report = json!({
                "hypothesis": out.hypothesis,
                "members": members,
                "aff": out.family.aff(),
                "family_size": d.family_size,
                "class_size": d.class_size.to_string(),
                "selected_index": d.selected_index,
                "empirical_error": d.selected_error.to_string(),
                "best_error": d.best_error.to_string(),
                "log_normalizer": d.log_normalizer,
                "holdout_error": holdout_error,
            });
            emit(cli.out.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&report)?))?;
        }
        Command::Erm { data } => {
            let ds = read_csv_path(data)?;
            let (h, e) = erm_halfspace(&partition(&ds).all, ds.dim())?;
            let report = json!({ "halfspace": h, "error": e.to_string(), "mistakes": e.mistakes });
            emit(cli.out.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&report)?))?;
        }
        Command::VerifyDp { data, epsilon, trials } => {
            let ds = read_csv_path(data)?;
            let opts = AuditOptions {
                pool_cap: cli.pool_cap,
                trials: *trials,
                budget: cli.budget.map_or(AUDIT_BUDGET, u128::from),
            };
            let audit = verify_dp(&ds, *epsilon, &opts, seed)?;
            let mut text = String::new();
            for (i, p) in audit.pairs.iter().enumerate() {
                text.push_str(&format!("pair {i:>3} entry {:>5} max_log_ratio {:.12}\n", p.index, p.max_log_ratio));
            }
            let verdict = if audit.passed() { "PASS" } else { "FAIL" };
            text.push_str(&format!(
                "{verdict} max_log_ratio {:.12} epsilon {} pairs {} class_size {}\n",
                audit.max_log_ratio,
                audit.epsilon,
                audit.pairs.len(),
                audit.class_size
            ));
            emit(cli.out.as_deref(), &text)?;
            if !audit.passed() {
                return Err(Failure::Verify(format!("log-ratio {} exceeds epsilon", audit.max_log_ratio)));
            }
        }
        Command::Bounds {
            dim,
            epsilon,
            alpha,
            beta,
            c,
            n,
            class_size,
            k,
            emp_err,
        } => {
            let mut reports = vec![
                realizable_sample_bound(*dim, *epsilon, *alpha, *beta, *c)?,
                agnostic_sample_bound(*dim, *epsilon, *alpha, *beta, *c)?,
            ];
            if let Some(n) = n {
                let k = k.unwrap_or((*dim * *dim) as u64);
                reports.push(compression_bound(k, *n, *beta, *emp_err)?);
                if let Some(size) = class_size {
                    reports.push(mechanism_utility_bound(*size, *epsilon, *n, *beta)?);
                }
            }
            let mut text = format!("{:<12} {:>14} {:>6} inputs\n", "bound", "value", "c");
            for r in &reports {
                text.push_str(&bound_row(r));
            }
            text.push_str("constants are not fixed by the asymptotic statements; c is reported, not derived\n");
            text.push_str(&serde_json::to_string_pretty(&reports)?);
            text.push('\n');
            emit(cli.out.as_deref(), &text)?;
        }
        Command::Sweep => {
            let path = cli
                .config
                .as_ref()
                .ok_or_else(|| Failure::Usage("sweep needs --config".into()))?;
            let mut cfg = SweepConfig::load(path)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if cli.pool_cap.is_some() {
                cfg.pool_cap = cli.pool_cap;
            }
            if let Some(b) = cli.budget {
                cfg.budget = b;
            }
            if cli.out.is_some() {
                cfg.out = cli.out.clone();
            }
            let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("sweep-out"));
            let report = run_sweep(&cfg, Some(&out))?;
            write_summaries(&report.summaries, io::stdout().lock())?;
        }
        Command::Summarize { records, c, beta } => {
            let rs = read_records(File::open(records)?)?;
            let s = summarize(&rs, *c, *beta);
            match &cli.out {
                Some(p) => write_summaries(&s, File::create(p)?)?,
                None => write_summaries(&s, io::stdout().lock())?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
