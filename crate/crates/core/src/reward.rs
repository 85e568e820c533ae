//! Separable concave patient utility and the reward interface the solver
//! consumes.

use crate::error::ModelError;
use crate::model::{IntermediateKind, RewardParams, Scenario, State, StateSpace};

/// `100 / bound^d * (bound^d - level^d)`: 100 at level 0, 0 at `bound`.
#[inline]
fn concave_utility(level: usize, exponent: f64, bound: usize) -> f64 {
    let top = (bound as f64).powf(exponent);
    100.0 / top * (top - (level as f64).powf(exponent))
}

fn check_level(name: &str, level: usize, bound: usize) -> Result<(), ModelError> {
    if level > bound {
        return Err(ModelError::Domain(format!("{name} = {level} outside 0..={bound}")));
    }
    Ok(())
}

/// Side-effect utility `f(phi; d)`.
pub fn side_effect_utility(phi: usize, d: f64, m: usize) -> Result<f64, ModelError> {
    check_level("phi", phi, m)?;
    Ok(concave_utility(phi, d, m))
}

/// Tumor-progression utility `g(tau; d)`.
pub fn tumor_utility(tau: usize, d: f64, n: usize) -> Result<f64, ModelError> {
    check_level("tau", tau, n)?;
    Ok(concave_utility(tau, d, n))
}

/// `c_phi * f(phi) + c_tau * g(tau)`; the history flag carries no utility.
pub fn terminal_reward(state: &State, params: &RewardParams, m: usize, n: usize) -> Result<f64, ModelError> {
    StateSpace::new(m, n).check(state)?;
    Ok(params.c_phi * concave_utility(state.phi, params.d_phi, m)
        + params.c_tau * concave_utility(state.tau, params.d_tau, n))
}

/// Per-period reward, a function of the successor state only.
pub fn intermediate_reward(next: &State, params: &RewardParams, m: usize, n: usize) -> Result<f64, ModelError> {
    StateSpace::new(m, n).check(next)?;
    Ok(match params.intermediate {
        IntermediateKind::None => 0.0,
        IntermediateKind::SideEffect => params.c_m * concave_utility(next.phi, params.d_phi, m),
        IntermediateKind::Tumor => params.c_m * concave_utility(next.tau, params.d_tau, n),
    })
}

/// General reward contract `r_t(s, a, s')` plus the terminal `r_{T+1}(s)`.
///
/// Scenario files only construct next-state rewards ([`ScenarioRewards`]),
/// but the solver accepts anything implementing this.
pub trait RewardModel: Sync {
    fn terminal(&self, state: &State) -> f64;
    fn intermediate(&self, period: usize, state: &State, action: usize, next: &State) -> f64;
}

/// Tabulated rewards for a scenario.
#[derive(Debug, Clone)]
pub struct ScenarioRewards {
    n: usize,
    terminal: Vec<f64>,
    intermediate: Vec<f64>,
}

impl ScenarioRewards {
    /// Tabulates rewards over `(phi, tau)`; the scenario must be valid.
    pub fn new(scenario: &Scenario) -> Self {
        let (m, n, p) = (scenario.m, scenario.n, &scenario.reward);
        let mut terminal = Vec::with_capacity((m + 1) * (n + 1));
        let mut intermediate = Vec::with_capacity((m + 1) * (n + 1));
        for phi in 0..=m {
            for tau in 0..=n {
                let s = State::new(0, phi, tau);
                terminal.push(terminal_reward(&s, p, m, n).expect("level in range"));
                intermediate.push(intermediate_reward(&s, p, m, n).expect("level in range"));
            }
        }
        ScenarioRewards { n, terminal, intermediate }
    }

    #[inline]
    fn slot(&self, state: &State) -> usize {
        state.phi * (self.n + 1) + state.tau
    }
}

impl RewardModel for ScenarioRewards {
    #[inline]
    fn terminal(&self, state: &State) -> f64 {
        self.terminal[self.slot(state)]
    }

    #[inline]
    fn intermediate(&self, _period: usize, _state: &State, _action: usize, next: &State) -> f64 {
        self.intermediate[self.slot(next)]
    }
}

/// Every reward mapped through `r -> scale * r + shift`.
#[derive(Debug, Clone)]
pub struct AffineRewards<R> {
    pub inner: R,
    pub scale: f64,
    pub shift: f64,
}

impl<R: RewardModel> RewardModel for AffineRewards<R> {
    fn terminal(&self, state: &State) -> f64 {
        self.scale * self.inner.terminal(state) + self.shift
    }

    fn intermediate(&self, period: usize, state: &State, action: usize, next: &State) -> f64 {
        self.scale * self.inner.intermediate(period, state, action, next) + self.shift
    }
}
