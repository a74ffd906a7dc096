//! Private-public mixture (PPM) learning of halfspaces.
//!
//! A finite hypothesis class is built from the public examples only, and a
//! hypothesis is selected from it with the exponential mechanism, which is
//! ε-differentially private with respect to the private examples.

pub mod bounds;
pub mod combinations;
pub mod data;
pub mod error;
pub mod geometry;
pub mod learner;
pub mod model;
pub mod privacy;

pub use error::{Error, Result};
