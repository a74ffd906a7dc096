//! Seeded synthetic generators for the private-public mixture model and
//! dataset CSV serialization.

mod csv_io;
mod generator;

pub use csv_io::{read_csv, read_csv_path, write_csv, write_csv_path};
pub use generator::{default_target, generate, generate_holdout, GeneratorSpec, Marginal};
