//! Exact finite-horizon Markov decision processes for multi-modality
//! treatment planning.
//!
//! The patient state is `(h, phi, tau)`: whether the one-shot Type 1
//! modality has been used, the normal-tissue side-effect level and the
//! tumor-progression level. [`solver::solve`] runs backward induction over
//! every state and period; [`oracle`] re-derives the same values by plain
//! recursion and by simulation.
//!
//! ```
//! use oncodp_core::{preset, solve, State};
//!
//! let scenario = preset("base").unwrap();
//! let solution = solve(&scenario).unwrap();
//! let v = solution.value(1, &State::new(0, 5, 5));
//! assert!((0.0..=100.0).contains(&v));
//! ```

pub mod analysis;
pub mod error;
pub mod model;
pub mod oracle;
pub mod reward;
pub mod scenario_io;
pub mod solver;
pub mod transition;

pub use error::ModelError;
pub use model::{
    validate_scenario, IncrementRow, IntermediateKind, Modality, ModalityKind, RewardParams, Scenario, State,
    StateSpace,
};
pub use scenario_io::{preset, ScenarioIoError};
pub use solver::{solve, solve_with, ActionSet, Execution, Solution};
