//! Hyperparameter search: exhaustive grid and GP expected-improvement.

mod gp;
mod search;
mod space;

pub use gp::{expected_improvement, GpSurrogate, JITTER, LENGTH_SCALE, NOISE_RATIO};
pub use search::{
    bayesian_search, grid_search, SearchOutcome, Trial, CANDIDATE_POOL, INITIAL_TRIALS,
};
pub use space::{HyperParams, LearningRateAxis, SearchSpace};
