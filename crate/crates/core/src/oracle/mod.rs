//! Independent checks on the solver: a recursive expectimax evaluation and a
//! seeded Monte-Carlo simulator.

mod expectimax;
mod simulate;

use thiserror::Error;

use crate::error::ModelError;

pub use expectimax::{expectimax_value, Expectimax, DEFAULT_DEPTH_BUDGET};
pub use simulate::{
    derive_seed, monte_carlo_value, monte_carlo_value_with, simulate_trajectory, EstimateWithError, Policy,
    TrajectoryRecord,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("recursion depth {depth} exceeds budget {budget}")]
    Depth { depth: usize, budget: usize },

    #[error(transparent)]
    Model(#[from] ModelError),
}
