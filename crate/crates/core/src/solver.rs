//! Exact backward induction over the dense state space.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{Scenario, State, StateSpace};
use crate::reward::{RewardModel, ScenarioRewards};
use crate::transition::{transition_unchecked, TransitionDistribution};

/// Whether per-period sweeps may fan out over threads.
///
/// Without the `parallel` feature both variants run sequentially. Results
/// are bit-identical either way: each state is evaluated independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// A subset of action indices, iterated in action order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionSet(u64);

impl ActionSet {
    pub const fn empty() -> Self {
        ActionSet(0)
    }

    pub fn insert(&mut self, action: usize) {
        assert!(action < 64, "action index {action} too large");
        self.0 |= 1 << action;
    }

    pub fn contains(&self, action: usize) -> bool {
        action < 64 && self.0 & (1 << action) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn first(&self) -> Option<usize> {
        (!self.is_empty()).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn last(&self) -> Option<usize> {
        (!self.is_empty()).then(|| 63 - self.0.leading_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |&a| self.contains(a))
    }

    /// True when the members form one run of consecutive indices.
    pub fn is_contiguous(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(lo), Some(hi)) => hi - lo + 1 == self.len(),
            _ => true,
        }
    }
}

impl FromIterator<usize> for ActionSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = ActionSet::empty();
        for a in iter {
            set.insert(a);
        }
        set
    }
}

#[inline]
fn tie_threshold(best: f64, tolerance: f64) -> f64 {
    best - tolerance * best.abs() - tolerance
}

/// Indices whose value is within `tolerance` (relative plus absolute) of the
/// maximum.
pub fn argmax_set(values: &[f64], tolerance: f64) -> Result<ActionSet, ModelError> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() {
        return Err(ModelError::Empty);
    }
    let threshold = tie_threshold(best, tolerance);
    Ok(values
        .iter()
        .enumerate()
        .filter(|(_, &q)| q >= threshold)
        .map(|(a, _)| a)
        .collect())
}

/// Least aggressive member of a tied set.
pub fn canonical_action(argmax: ActionSet) -> Option<usize> {
    argmax.last()
}

/// Value tables, action values and argmax sets for every period.
///
/// Periods run `1..=T` for decisions and `T + 1` for the terminal slice.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    horizon: usize,
    space: StateSpace,
    action_names: Vec<String>,
    tie_tolerance: f64,
    values: Vec<f64>,
    action_values: Vec<f64>,
    argmax: Vec<ActionSet>,
}

impl Solution {
    /// Assembles a solution from dense tables laid out period-major, with
    /// states in [`StateSpace`] order and actions innermost.
    pub fn from_tables(
        horizon: usize,
        space: StateSpace,
        action_names: Vec<String>,
        tie_tolerance: f64,
        values: Vec<f64>,
        action_values: Vec<f64>,
        argmax: Vec<ActionSet>,
    ) -> Result<Self, ModelError> {
        let (s, a) = (space.len(), action_names.len());
        if horizon == 0 || a == 0 || a > 64 {
            return Err(ModelError::Domain("empty horizon or action list".into()));
        }
        if values.len() != (horizon + 1) * s
            || action_values.len() != horizon * s * a
            || argmax.len() != horizon * s
        {
            return Err(ModelError::Domain("table sizes do not match the state space".into()));
        }
        if argmax.iter().any(|set| set.is_empty() || set.last().unwrap() >= a) {
            return Err(ModelError::Domain("argmax set empty or naming an unknown action".into()));
        }
        Ok(Solution {
            horizon,
            space,
            action_names,
            tie_tolerance,
            values,
            action_values,
            argmax,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn action_names(&self) -> &[String] {
        &self.action_names
    }

    pub fn num_actions(&self) -> usize {
        self.action_names.len()
    }

    pub fn tie_tolerance(&self) -> f64 {
        self.tie_tolerance
    }

    fn slot(&self, t: usize, state: &State) -> usize {
        (t - 1) * self.space.len() + self.space.index(state)
    }

    /// `V_t(state)` for `t` in `1..=T+1`. Panics outside that range.
    pub fn value(&self, t: usize, state: &State) -> f64 {
        assert!((1..=self.horizon + 1).contains(&t), "period {t} out of range");
        self.values[self.slot(t, state)]
    }

    /// The whole `V_t` slice in state order.
    pub fn values_at(&self, t: usize) -> &[f64] {
        assert!((1..=self.horizon + 1).contains(&t), "period {t} out of range");
        let s = self.space.len();
        &self.values[(t - 1) * s..t * s]
    }

    /// `Q_t(state, .)` for `t` in `1..=T`.
    pub fn action_values(&self, t: usize, state: &State) -> &[f64] {
        assert!((1..=self.horizon).contains(&t), "period {t} out of range");
        let a = self.num_actions();
        let i = self.slot(t, state) * a;
        &self.action_values[i..i + a]
    }

    pub fn argmax_set(&self, t: usize, state: &State) -> ActionSet {
        assert!((1..=self.horizon).contains(&t), "period {t} out of range");
        self.argmax[self.slot(t, state)]
    }

    pub fn canonical_action(&self, t: usize, state: &State) -> usize {
        canonical_action(self.argmax_set(t, state)).expect("argmax sets are never empty")
    }

    pub fn same_shape(&self, other: &Solution) -> bool {
        self.horizon == other.horizon
            && self.space == other.space
            && self.num_actions() == other.num_actions()
    }
}

/// Solves a scenario with its own rewards.
pub fn solve(scenario: &Scenario) -> Result<Solution, ModelError> {
    solve_with(scenario, Execution::default())
}

pub fn solve_with(scenario: &Scenario, execution: Execution) -> Result<Solution, ModelError> {
    scenario.validate()?;
    let rewards = ScenarioRewards::new(scenario);
    Ok(backward_induction(scenario, &rewards, execution))
}

/// Solves the scenario's dynamics under an arbitrary reward model.
pub fn solve_with_rewards<R: RewardModel>(
    scenario: &Scenario,
    rewards: &R,
    execution: Execution,
) -> Result<Solution, ModelError> {
    scenario.validate()?;
    Ok(backward_induction(scenario, rewards, execution))
}

fn backward_induction<R: RewardModel>(scenario: &Scenario, rewards: &R, execution: Execution) -> Solution {
    let space = scenario.space();
    let (horizon, s_len, a_len) = (scenario.horizon, space.len(), scenario.actions.len());
    let tolerance = scenario.tie_tolerance;

    // Kernels are stationary: tabulate once as (successor index, probability).
    let kernel: Vec<Vec<(State, usize, f64)>> = (0..s_len * a_len)
        .map(|i| {
            let dist: TransitionDistribution = transition_unchecked(scenario, &space.state(i / a_len), i % a_len);
            dist.iter()
                .map(|o| (o.state, space.index(&o.state), o.probability))
                .collect()
        })
        .collect();

    let mut values = vec![0.0; (horizon + 1) * s_len];
    let mut action_values = vec![0.0; horizon * s_len * a_len];
    let mut argmax = vec![ActionSet::empty(); horizon * s_len];

    for (i, v) in values[horizon * s_len..].iter_mut().enumerate() {
        *v = rewards.terminal(&space.state(i));
    }

    for t in (1..=horizon).rev() {
        let (current, next) = values[(t - 1) * s_len..(t + 1) * s_len].split_at_mut(s_len);
        let next: &[f64] = next;
        let q_period = &mut action_values[(t - 1) * s_len * a_len..t * s_len * a_len];
        let sets = &mut argmax[(t - 1) * s_len..t * s_len];

        let evaluate = |i: usize, q: &mut [f64], v: &mut f64, set: &mut ActionSet| {
            let state = space.state(i);
            for (a, q_a) in q.iter_mut().enumerate() {
                *q_a = kernel[i * a_len + a]
                    .iter()
                    .map(|&(succ, j, p)| p * (rewards.intermediate(t, &state, a, &succ) + next[j]))
                    .sum();
            }
            *v = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let threshold = tie_threshold(*v, tolerance);
            *set = (0..a_len).filter(|&a| q[a] >= threshold).collect();
        };

        match execution {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                q_period
                    .par_chunks_mut(a_len)
                    .zip(current.par_iter_mut())
                    .zip(sets.par_iter_mut())
                    .enumerate()
                    .for_each(|(i, ((q, v), set))| evaluate(i, q, v, set));
            }
            _ => {
                q_period
                    .chunks_mut(a_len)
                    .zip(current.iter_mut())
                    .zip(sets.iter_mut())
                    .enumerate()
                    .for_each(|(i, ((q, v), set))| evaluate(i, q, v, set));
            }
        }
    }

    Solution {
        horizon,
        space,
        action_names: scenario.action_names(),
        tie_tolerance: tolerance,
        values,
        action_values,
        argmax,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IncrementRow, Modality, ModalityKind, RewardParams};
    use crate::scenario_io::preset;

    pub(crate) fn tiny() -> Scenario {
        let mut s = preset("base").unwrap();
        s.horizon = 1;
        s.m = 2;
        s.n = 2;
        s
    }

    #[test]
    fn argmax_set_examples() {
        let set = argmax_set(&[10.0, 10.0 + 1e-12, 5.0], 1e-9).unwrap();
        assert_eq!(set.iter().collect::<Vec<_>>(), vec![0, 1]);
        let set = argmax_set(&[1.0, 2.0, 3.0], 1e-9).unwrap();
        assert_eq!(set.iter().collect::<Vec<_>>(), vec![2]);
        let set = argmax_set(&[7.0, 7.0, 7.0], 0.0).unwrap();
        assert_eq!(set.iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(argmax_set(&[], 1e-9), Err(ModelError::Empty));
    }

    #[test]
    fn canonical_action_is_least_aggressive() {
        assert_eq!(canonical_action([0, 1].into_iter().collect()), Some(1));
        assert_eq!(canonical_action([2].into_iter().collect()), Some(2));
        assert_eq!(canonical_action([0, 1, 2, 3].into_iter().collect()), Some(3));
        assert_eq!(canonical_action(ActionSet::empty()), None);
    }

    #[test]
    fn action_set_contiguity() {
        assert!([1, 2, 3].into_iter().collect::<ActionSet>().is_contiguous());
        assert!(![0, 2].into_iter().collect::<ActionSet>().is_contiguous());
        assert!(ActionSet::empty().is_contiguous());
    }

    #[test]
    fn tiny_instance_matches_hand_expectimax() {
        // Hand expectimax over the <= 4 outcomes per action at (0,0,1), with
        // r = f/2 + g/2 and f(0..=2) = g(0..=2) = (100, 75, 0):
        //   M1: .28*100 + .12*87.5 + .42*87.5 + .18*75 = 88.75
        //   M2: .36*100 + .24*87.5 + .24*87.5 + .16*75 = 90
        //   M3: .3*87.5 + .7*50                        = 61.25
        let sol = solve(&tiny()).unwrap();
        let s = State::new(0, 0, 1);
        let q = sol.action_values(1, &s);
        for (got, want) in q.iter().zip([88.75, 90.0, 61.25]) {
            assert!((got - want).abs() <= 1e-12, "{q:?}");
        }
        assert!((sol.value(1, &s) - 90.0).abs() <= 1e-12);
        assert_eq!(sol.canonical_action(1, &s), 1);
    }

    #[test]
    fn terminal_slice_is_terminal_reward() {
        let sc = preset("base").unwrap();
        let sol = solve(&sc).unwrap();
        let rewards = ScenarioRewards::new(&sc);
        for s in sc.space().iter() {
            assert_eq!(sol.value(sc.horizon + 1, &s), rewards.terminal(&s));
        }
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        for name in ["base", "inter-tau", "table5-four-actions"] {
            let sc = preset(name).unwrap();
            let a = solve_with(&sc, Execution::Sequential).unwrap();
            let b = solve_with(&sc, Execution::Parallel).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn invalid_scenario_is_rejected() {
        let mut sc = preset("base").unwrap();
        sc.actions[1].phi_row = IncrementRow::new(0.0, 0.6, 0.5);
        assert!(matches!(solve(&sc), Err(ModelError::RowSum { .. })));
    }

    #[test]
    fn from_tables_checks_shapes() {
        let space = StateSpace::new(1, 1);
        let names = vec!["a".to_string()];
        let ok = Solution::from_tables(1, space, names.clone(), 0.0, vec![0.0; 16], vec![0.0; 8], vec![[0].into_iter().collect(); 8]);
        assert!(ok.is_ok());
        let bad = Solution::from_tables(1, space, names, 0.0, vec![0.0; 15], vec![0.0; 8], vec![[0].into_iter().collect(); 8]);
        assert!(bad.is_err());
    }

    #[test]
    fn custom_reward_model_is_honoured() {
        // Paying only for surveillance makes it strictly optimal everywhere.
        struct PaySurveillance;
        impl RewardModel for PaySurveillance {
            fn terminal(&self, _: &State) -> f64 {
                0.0
            }
            fn intermediate(&self, _: usize, _: &State, action: usize, _: &State) -> f64 {
                if action == 2 { 1.0 } else { 0.0 }
            }
        }
        let sc = Scenario {
            horizon: 2,
            m: 3,
            n: 3,
            actions: vec![
                Modality::new("A", ModalityKind::Type1, IncrementRow::new(0.0, 0.5, 0.5), IncrementRow::new(0.5, 0.5, 0.0)),
                Modality::new("B", ModalityKind::Type2, IncrementRow::new(0.0, 0.5, 0.5), IncrementRow::new(0.5, 0.5, 0.0)),
                Modality::new("C", ModalityKind::Type3, IncrementRow::new(0.5, 0.5, 0.0), IncrementRow::new(0.0, 0.5, 0.5)),
            ],
            reward: RewardParams::balanced(2.0),
            tie_tolerance: 1e-9,
        };
        let sol = solve_with_rewards(&sc, &PaySurveillance, Execution::Sequential).unwrap();
        for s in sc.space().iter() {
            assert_eq!(sol.canonical_action(1, &s), 2);
            assert!(sol.value(1, &s) >= 2.0 - 1e-12);
        }
    }
}
