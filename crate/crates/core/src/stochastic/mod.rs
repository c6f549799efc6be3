//! Reflected diffusions on the one-dimensional model reductions, their local
//! time and path weights, and Monte-Carlo estimators of probabilistic
//! right-hand sides.
//!
//! Every path draws from its own ChaCha8 stream `(seed, path index)`, and
//! per-path values are reduced in index order, so estimates do not depend on
//! the number of worker threads.

mod estimate;
mod path;
mod time_change;


pub use estimate::{
    estimate_functional, estimate_functional_with, local_time_moment, mean_and_stderr, Estimate, Functional,
    FunctionalId, MonteCarlo,
};
pub use path::{
    path_rng, path_weight, simulate_path, simulate_reflected_path, PathSample, Potentials, ReflectionScheme,
    ScalarField, MAX_RESAMPLES,
};
pub use time_change::{cutoff_moments, time_change, Cutoff, CutoffMoment, TimeChange, CUTOFF_FLOOR};
