use crate::error::ModelError;
use crate::model::{Scenario, State};
use crate::reward::{intermediate_reward, terminal_reward};
use crate::transition::transition_distribution;

use super::OracleError;

/// Default bound on the number of decision periods the recursion unrolls.
pub const DEFAULT_DEPTH_BUDGET: usize = 6;

/// Memo-free recursive evaluation of the optimal expected reward.
///
/// Built only on the checked transition and reward primitives, so it shares
/// nothing with the tabulated backward induction it is used to verify.
#[derive(Debug, Clone, Copy)]
pub struct Expectimax<'a> {
    scenario: &'a Scenario,
    depth_budget: usize,
}

impl<'a> Expectimax<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        Expectimax {
            scenario,
            depth_budget: DEFAULT_DEPTH_BUDGET,
        }
    }

    pub fn with_depth_budget(mut self, budget: usize) -> Self {
        self.depth_budget = budget;
        self
    }

    fn check(&self, state: &State, t: usize) -> Result<(), OracleError> {
        self.scenario.validate()?;
        self.scenario.space().check(state)?;
        self.scenario.check_period(t)?;
        let depth = self.scenario.horizon + 1 - t;
        if depth > self.depth_budget {
            return Err(OracleError::Depth {
                depth,
                budget: self.depth_budget,
            });
        }
        Ok(())
    }

    /// Optimal expected total reward from `state` at period `t`.
    pub fn value(&self, state: &State, t: usize) -> Result<f64, OracleError> {
        self.check(state, t)?;
        Ok(self.recurse(state, t)?)
    }

    /// Expected total reward of each action at `state` in period `t <= T`,
    /// acting optimally afterwards.
    pub fn action_values(&self, state: &State, t: usize) -> Result<Vec<f64>, OracleError> {
        self.check(state, t)?;
        if t > self.scenario.horizon {
            return Err(ModelError::Domain(format!("no decision at terminal period {t}")).into());
        }
        (0..self.scenario.actions.len())
            .map(|a| self.action_value(state, a, t).map_err(OracleError::from))
            .collect()
    }

    fn recurse(&self, state: &State, t: usize) -> Result<f64, ModelError> {
        let sc = self.scenario;
        if t == sc.horizon + 1 {
            return terminal_reward(state, &sc.reward, sc.m, sc.n);
        }
        let mut best = f64::NEG_INFINITY;
        for a in 0..sc.actions.len() {
            best = best.max(self.action_value(state, a, t)?);
        }
        Ok(best)
    }

    fn action_value(&self, state: &State, action: usize, t: usize) -> Result<f64, ModelError> {
        let sc = self.scenario;
        let mut total = 0.0;
        for outcome in transition_distribution(sc, state, action)?.iter() {
            let now = intermediate_reward(&outcome.state, &sc.reward, sc.m, sc.n)?;
            total += outcome.probability * (now + self.recurse(&outcome.state, t + 1)?);
        }
        Ok(total)
    }
}

/// Optimal expected total reward from `state` at period `t`, with the
/// default depth budget.
pub fn expectimax_value(scenario: &Scenario, state: &State, t: usize) -> Result<f64, OracleError> {
    Expectimax::new(scenario).value(state, t)
}
