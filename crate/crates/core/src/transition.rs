//! Factored transition kernel with absorbing boundaries.
//!
//! Rules are applied in order:
//!
//! 1. Misuse: the Type 1 modality with `h = 1` sends the patient to `(1, m, n)`.
//! 2. Death: `phi = m` or `tau = n` freezes the whole state.
//! 3. Otherwise `h' = 1` after Type 1 and `h' = h` after anything else; the
//!    tumor stays at 0 once in remission; `phi'` and `tau'` are drawn
//!    independently from the increment rows, clamped to the level bounds.

use std::ops::Deref;

use arrayvec::ArrayVec;

use crate::error::ModelError;
use crate::model::{IncrementRow, ModalityKind, Scenario, State};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub state: State,
    pub probability: f64,
}

/// Sparse distribution over successor states, positive masses only.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionDistribution {
    outcomes: ArrayVec<Outcome, 9>,
}

impl TransitionDistribution {
    fn point(state: State) -> Self {
        let mut outcomes = ArrayVec::new();
        outcomes.push(Outcome {
            state,
            probability: 1.0,
        });
        TransitionDistribution { outcomes }
    }

    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    pub fn probability_of(&self, state: &State) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| o.state == *state)
            .map(|o| o.probability)
            .sum()
    }
}

impl Deref for TransitionDistribution {
    type Target = [Outcome];

    fn deref(&self) -> &[Outcome] {
        &self.outcomes
    }
}

/// Marginal of one coordinate: at most three levels after clamping and merging.
fn marginal(level: usize, bound: usize, row: &IncrementRow) -> ArrayVec<(usize, f64), 3> {
    let mut out: ArrayVec<(usize, f64), 3> = ArrayVec::new();
    for (delta, p) in row.moves() {
        if p <= 0.0 {
            continue;
        }
        let next = level.saturating_add_signed(delta).min(bound);
        match out.iter_mut().find(|(l, _)| *l == next) {
            Some(slot) => slot.1 += p,
            None => out.push((next, p)),
        }
    }
    out
}

/// Successor distribution for a valid scenario; panics on an out-of-range
/// action index.
pub(crate) fn transition_unchecked(scenario: &Scenario, state: &State, action: usize) -> TransitionDistribution {
    let modality = &scenario.actions[action];
    let (m, n) = (scenario.m, scenario.n);

    if state.h == 1 && modality.kind == ModalityKind::Type1 {
        return TransitionDistribution::point(State::new(1, m, n));
    }
    if state.phi == m || state.tau == n {
        return TransitionDistribution::point(*state);
    }

    let h = if modality.kind == ModalityKind::Type1 { 1 } else { state.h };
    let phis = marginal(state.phi, m, &modality.phi_row);
    let taus = if state.tau == 0 {
        let mut remission = ArrayVec::new();
        remission.push((0, 1.0));
        remission
    } else {
        marginal(state.tau, n, &modality.tau_row)
    };

    let mut outcomes = ArrayVec::new();
    for &(phi, p_phi) in &phis {
        for &(tau, p_tau) in &taus {
            outcomes.push(Outcome {
                state: State::new(h, phi, tau),
                probability: p_phi * p_tau,
            });
        }
    }
    TransitionDistribution { outcomes }
}

/// `P(. | state, action)` with state and action checked against the scenario.
pub fn transition_distribution(
    scenario: &Scenario,
    state: &State,
    action: usize,
) -> Result<TransitionDistribution, ModelError> {
    scenario.space().check(state)?;
    scenario.check_action(action)?;
    Ok(transition_unchecked(scenario, state, action))
}
