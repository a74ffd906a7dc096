//! Construction of the public halfspace family, the class `G` over it, and
//! private selection from `G`.

mod class;
mod erm;
mod family;
mod mechanism;
mod score;

pub use class::{enumerate_class, predict, BoundHypothesis, ClassG, ClassIter, IntersectionHypothesis};
pub use erm::erm_halfspace;
pub use family::{construct_halfspace_family, HalfspaceFamily};
pub use mechanism::{
    best_in_class, class_mistakes, learn_half, learn_half_with_rng, Diagnostics, LearnOptions, MechanismOutcome,
    MistakeHistogram, Sampling, DEFAULT_BUDGET,
};
pub(crate) use mechanism::check_epsilon;
pub use score::{Backend, Scorer};
