use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::ModelError;
use crate::model::{Scenario, State};
use crate::reward::{intermediate_reward, terminal_reward};
use crate::solver::{Execution, Solution};
use crate::transition::transition_distribution;

/// A decision rule `(period, state) -> action index`.
pub trait Policy: Sync {
    fn action(&self, period: usize, state: &State) -> usize;
}

impl Policy for Solution {
    fn action(&self, period: usize, state: &State) -> usize {
        self.canonical_action(period, state)
    }
}

/// One simulated treatment course.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub states: Vec<State>,
    pub actions: Vec<usize>,
    pub reward_total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateWithError {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
    /// Set when `n == 1`: the standard error is undefined and reported as 0.
    pub single_sample: bool,
}

/// Sub-seed for trajectory `index` (SplitMix64 finalizer over a Weyl step).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Samples one course from `start` at period 1 under `policy`.
///
/// The generator is ChaCha8 seeded with `seed`; each step draws one uniform
/// and walks the successor distribution in its fixed outcome order.
pub fn simulate_trajectory<P: Policy + ?Sized>(
    scenario: &Scenario,
    policy: &P,
    start: State,
    seed: u64,
) -> Result<TrajectoryRecord, ModelError> {
    scenario.space().check(&start)?;
    let (params, m, n) = (&scenario.reward, scenario.m, scenario.n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut states = Vec::with_capacity(scenario.horizon + 1);
    let mut actions = Vec::with_capacity(scenario.horizon);
    let mut total = 0.0;
    let mut state = start;
    states.push(state);

    for t in 1..=scenario.horizon {
        let action = policy.action(t, &state);
        let dist = transition_distribution(scenario, &state, action)?;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut next = dist[dist.len() - 1].state;
        for outcome in dist.iter() {
            acc += outcome.probability;
            if u < acc {
                next = outcome.state;
                break;
            }
        }
        total += intermediate_reward(&next, params, m, n)?;
        actions.push(action);
        states.push(next);
        state = next;
    }
    total += terminal_reward(&state, params, m, n)?;

    Ok(TrajectoryRecord {
        seed,
        states,
        actions,
        reward_total: total,
    })
}

/// Mean and standard error of the total reward over `n` courses.
pub fn monte_carlo_value<P: Policy + ?Sized>(
    scenario: &Scenario,
    policy: &P,
    start: State,
    n: usize,
    seed: u64,
) -> Result<EstimateWithError, ModelError> {
    monte_carlo_value_with(scenario, policy, start, n, seed, Execution::default())
}

pub fn monte_carlo_value_with<P: Policy + ?Sized>(
    scenario: &Scenario,
    policy: &P,
    start: State,
    n: usize,
    seed: u64,
    execution: Execution,
) -> Result<EstimateWithError, ModelError> {
    if n == 0 {
        return Err(ModelError::Domain("sample count must be at least 1".into()));
    }
    scenario.space().check(&start)?;
    let sample = |i: usize| {
        simulate_trajectory(scenario, policy, start, derive_seed(seed, i as u64)).map(|r| r.reward_total)
    };

    let totals: Vec<f64> = match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(sample).collect::<Result<_, _>>()?
        }
        _ => (0..n).map(sample).collect::<Result<_, _>>()?,
    };

    // Welford in index order: independent of scheduling, and exact for
    // constant samples.
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for (k, &x) in totals.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    let std_error = if n > 1 {
        (m2 / (n - 1) as f64).sqrt() / (n as f64).sqrt()
    } else {
        0.0
    };

    Ok(EstimateWithError {
        mean,
        std_error,
        n,
        single_sample: n == 1,
    })
}
