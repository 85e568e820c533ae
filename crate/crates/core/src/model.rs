//! Patient state, treatment modalities, reward parameters and the scenario
//! that ties them together.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Tolerance on kernel row sums.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// Default relative-plus-absolute tolerance for detecting tied actions.
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-9;

/// The Type 1 modality may be administered once per treatment course.
pub const MAX_TYPE1_USES: u32 = 1;

/// Patient state `(h, phi, tau)`.
///
/// `h` records whether the Type 1 modality has been used. `phi = 0` is no
/// side effect and `phi = m` is death by toxicity; `tau = 0` is remission
/// and `tau = n` is death by tumor progression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct State {
    pub h: u8,
    pub phi: usize,
    pub tau: usize,
}

impl State {
    pub const fn new(h: u8, phi: usize, tau: usize) -> Self {
        State { h, phi, tau }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.h, self.phi, self.tau)
    }
}

/// The finite state space `{0,1} x {0..=m} x {0..=n}` with a dense layout.
///
/// States are indexed h-major, then phi, then tau.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpace {
    pub m: usize,
    pub n: usize,
}

impl StateSpace {
    pub const fn new(m: usize, n: usize) -> Self {
        StateSpace { m, n }
    }

    pub const fn len(&self) -> usize {
        2 * (self.m + 1) * (self.n + 1)
    }

    pub const fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, state: &State) -> bool {
        state.h <= 1 && state.phi <= self.m && state.tau <= self.n
    }

    pub fn check(&self, state: &State) -> Result<(), ModelError> {
        if self.contains(state) {
            Ok(())
        } else {
            Err(ModelError::Domain(format!(
                "state {state} outside h in {{0,1}}, phi in 0..={}, tau in 0..={}",
                self.m, self.n
            )))
        }
    }

    #[inline]
    pub fn index(&self, state: &State) -> usize {
        (usize::from(state.h) * (self.m + 1) + state.phi) * (self.n + 1) + state.tau
    }

    #[inline]
    pub fn state(&self, index: usize) -> State {
        let tau = index % (self.n + 1);
        let rest = index / (self.n + 1);
        let phi = rest % (self.m + 1);
        let h = (rest / (self.m + 1)) as u8;
        State { h, phi, tau }
    }

    pub fn iter(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.len()).map(move |i| self.state(i))
    }

    /// Death by toxicity or by tumor progression.
    pub fn is_death(&self, state: &State) -> bool {
        state.phi == self.m || state.tau == self.n
    }

    /// Death states plus remission (`tau = 0`).
    pub fn is_absorbing(&self, state: &State) -> bool {
        self.is_death(state) || state.tau == 0
    }

    pub fn worst(&self) -> State {
        State::new(1, self.m, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModalityKind {
    /// High risk, high reward; one use per course.
    Type1,
    /// Lower risk and reward; repeatable.
    Type2,
    /// Surveillance.
    Type3,
}

impl ModalityKind {
    pub fn is_treatment(self) -> bool {
        !matches!(self, ModalityKind::Type3)
    }
}

/// Probabilities of a one-increment move `(down, stay, up)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IncrementRow(pub [f64; 3]);

impl IncrementRow {
    pub const fn new(down: f64, stay: f64, up: f64) -> Self {
        IncrementRow([down, stay, up])
    }

    pub fn down(&self) -> f64 {
        self.0[0]
    }

    pub fn stay(&self) -> f64 {
        self.0[1]
    }

    pub fn up(&self) -> f64 {
        self.0[2]
    }

    /// `(delta, probability)` pairs in down, stay, up order.
    pub fn moves(&self) -> impl Iterator<Item = (isize, f64)> + '_ {
        [-1isize, 0, 1].into_iter().zip(self.0)
    }

    fn validate(&self, path: &str) -> Result<(), ModelError> {
        for (j, &p) in self.0.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(ModelError::Sign {
                    path: format!("{path}/{j}"),
                    value: p,
                });
            }
        }
        let sum: f64 = self.0.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(ModelError::RowSum {
                path: path.to_string(),
                sum,
            });
        }
        Ok(())
    }
}

/// A treatment modality: its type and its increment kernels for side
/// effect and tumor progression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Modality {
    pub name: String,
    pub kind: ModalityKind,
    pub phi_row: IncrementRow,
    pub tau_row: IncrementRow,
}

impl Modality {
    pub fn new(name: &str, kind: ModalityKind, phi_row: IncrementRow, tau_row: IncrementRow) -> Self {
        Modality {
            name: name.to_string(),
            kind,
            phi_row,
            tau_row,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntermediateKind {
    #[default]
    None,
    /// Per-period reward `c_m * f(phi')` on the successor side effect.
    SideEffect,
    /// Per-period reward `c_m * g(tau')` on the successor tumor level.
    Tumor,
}

/// Weights and exponents of the separable concave reward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardParams {
    pub c_phi: f64,
    pub c_tau: f64,
    pub d_phi: f64,
    pub d_tau: f64,
    pub intermediate: IntermediateKind,
    pub c_m: f64,
}

impl RewardParams {
    /// Equal weights, equal exponents, no intermediate reward.
    pub fn balanced(d: f64) -> Self {
        RewardParams {
            c_phi: 0.5,
            c_tau: 0.5,
            d_phi: d,
            d_tau: d,
            intermediate: IntermediateKind::None,
            c_m: 0.0,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        let weights = [
            ("c_phi", self.c_phi),
            ("c_tau", self.c_tau),
            ("intermediate/c_m", self.c_m),
        ];
        for (field, w) in weights {
            if !w.is_finite() || w < 0.0 {
                return Err(ModelError::structure(
                    format!("/scenario/reward/{field}"),
                    format!("weight {w} must be finite and nonnegative"),
                ));
            }
        }
        for (field, d) in [("d_phi", self.d_phi), ("d_tau", self.d_tau)] {
            if !d.is_finite() || d < 1.0 {
                return Err(ModelError::structure(
                    format!("/scenario/reward/{field}"),
                    format!("exponent {d} must be at least 1"),
                ));
            }
        }
        Ok(())
    }
}

/// A complete problem instance.
///
/// Actions are listed most aggressive first: the Type 1 modality, then the
/// Type 2 modalities in decreasing effectiveness, then surveillance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub horizon: usize,
    pub m: usize,
    pub n: usize,
    pub actions: Vec<Modality>,
    pub reward: RewardParams,
    pub tie_tolerance: f64,
}

impl Scenario {
    pub fn space(&self) -> StateSpace {
        StateSpace::new(self.m, self.n)
    }

    pub fn action_names(&self) -> Vec<String> {
        self.actions.iter().map(|a| a.name.clone()).collect()
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }

    pub fn check_action(&self, action: usize) -> Result<&Modality, ModelError> {
        self.actions.get(action).ok_or_else(|| {
            ModelError::Domain(format!(
                "action index {action} outside 0..{}",
                self.actions.len()
            ))
        })
    }

    pub fn check_period(&self, t: usize) -> Result<(), ModelError> {
        if (1..=self.horizon + 1).contains(&t) {
            Ok(())
        } else {
            Err(ModelError::Domain(format!(
                "period {t} outside 1..={}",
                self.horizon + 1
            )))
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.horizon == 0 {
            return Err(ModelError::structure("/scenario/horizon", "horizon must be positive"));
        }
        if self.m == 0 {
            return Err(ModelError::structure("/scenario/m", "m must be positive"));
        }
        if self.n == 0 {
            return Err(ModelError::structure("/scenario/n", "n must be positive"));
        }
        if !self.tie_tolerance.is_finite() || self.tie_tolerance < 0.0 {
            return Err(ModelError::structure(
                "/scenario/options/tie_tolerance",
                "tie tolerance must be finite and nonnegative",
            ));
        }
        if self.actions.len() > 64 {
            return Err(ModelError::structure("/scenario/actions", "at most 64 actions"));
        }

        for (i, action) in self.actions.iter().enumerate() {
            let base = format!("/scenario/actions/{i}");
            if action.name.is_empty() {
                return Err(ModelError::structure(format!("{base}/name"), "empty action name"));
            }
            if self.actions[..i].iter().any(|a| a.name == action.name) {
                return Err(ModelError::structure(
                    format!("{base}/name"),
                    format!("duplicate action name {:?}", action.name),
                ));
            }
            action.phi_row.validate(&format!("{base}/phi_row"))?;
            action.tau_row.validate(&format!("{base}/tau_row"))?;

            // Treatments never improve side effect nor worsen the tumor;
            // surveillance does the opposite.
            let (phi_zero, tau_zero, why) = if action.kind.is_treatment() {
                (0, 2, "treatments cannot lower side effect or raise tumor progression")
            } else {
                (2, 0, "surveillance cannot raise side effect or lower tumor progression")
            };
            if action.phi_row.0[phi_zero] != 0.0 {
                return Err(ModelError::structure(format!("{base}/phi_row/{phi_zero}"), why));
            }
            if action.tau_row.0[tau_zero] != 0.0 {
                return Err(ModelError::structure(format!("{base}/tau_row/{tau_zero}"), why));
            }
        }

        let count = |kind| self.actions.iter().filter(|a| a.kind == kind).count();
        let (t1, t2, t3) = (
            count(ModalityKind::Type1),
            count(ModalityKind::Type2),
            count(ModalityKind::Type3),
        );
        if t1 != 1 || t3 != 1 || t2 == 0 {
            return Err(ModelError::structure(
                "/scenario/actions",
                format!(
                    "need exactly one type1, at least one type2 and exactly one type3 action \
                     (found {t1}, {t2}, {t3})"
                ),
            ));
        }
        if self.actions[0].kind != ModalityKind::Type1 {
            return Err(ModelError::structure(
                "/scenario/actions/0/kind",
                "the type1 action must come first",
            ));
        }
        let last = self.actions.len() - 1;
        if self.actions[last].kind != ModalityKind::Type3 {
            return Err(ModelError::structure(
                format!("/scenario/actions/{last}/kind"),
                "the type3 action must come last",
            ));
        }

        // Effectiveness order: along the list, treatments carry no more
        // side-effect risk and no more tumor reduction than their predecessor.
        for i in 1..last {
            let (prev, cur) = (&self.actions[i - 1], &self.actions[i]);
            if cur.phi_row.up() > prev.phi_row.up() + ROW_SUM_TOLERANCE {
                return Err(ModelError::structure(
                    format!("/scenario/actions/{i}/phi_row/2"),
                    format!("side-effect risk exceeds that of {:?}", prev.name),
                ));
            }
            if cur.tau_row.down() > prev.tau_row.down() + ROW_SUM_TOLERANCE {
                return Err(ModelError::structure(
                    format!("/scenario/actions/{i}/tau_row/0"),
                    format!("tumor reduction exceeds that of {:?}", prev.name),
                ));
            }
        }

        self.reward.validate()
    }
}

/// Returns the scenario iff every model invariant holds.
pub fn validate_scenario(scenario: Scenario) -> Result<Scenario, ModelError> {
    scenario.validate()?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario_io::preset;

    fn base() -> Scenario {
        preset("base").unwrap()
    }

    #[test]
    fn base_case_is_accepted() {
        assert!(validate_scenario(base()).is_ok());
    }

    #[test]
    fn row_sum_error_names_row() {
        let mut s = base();
        s.actions[1].phi_row = IncrementRow::new(0.0, 0.6, 0.5);
        let err = validate_scenario(s).unwrap_err();
        assert!(matches!(err, ModelError::RowSum { .. }), "{err:?}");
        assert_eq!(err.path(), Some("/scenario/actions/1/phi_row"));
    }

    #[test]
    fn negative_probability_is_sign_error() {
        let mut s = base();
        s.actions[0].phi_row = IncrementRow::new(0.0, 1.2, -0.2);
        let err = validate_scenario(s).unwrap_err();
        assert!(matches!(err, ModelError::Sign { .. }));
        assert_eq!(err.path(), Some("/scenario/actions/0/phi_row/2"));
    }

    #[test]
    fn sub_unit_exponent_is_structure_error() {
        let mut s = base();
        s.reward.d_phi = 0.5;
        let err = validate_scenario(s).unwrap_err();
        assert!(matches!(err, ModelError::Structure { .. }));
        assert_eq!(err.path(), Some("/scenario/reward/d_phi"));
    }

    #[test]
    fn action_type_counts_are_enforced() {
        let mut s = base();
        s.actions.remove(1);
        let err = validate_scenario(s).unwrap_err();
        assert_eq!(err.path(), Some("/scenario/actions"));

        let mut s = base();
        s.actions[1].kind = ModalityKind::Type1;
        assert!(validate_scenario(s).is_err());
    }

    #[test]
    fn structural_zeros_are_enforced() {
        let mut s = base();
        s.actions[2].phi_row = IncrementRow::new(0.5, 0.3, 0.2);
        let err = validate_scenario(s).unwrap_err();
        assert_eq!(err.path(), Some("/scenario/actions/2/phi_row/2"));

        let mut s = base();
        s.actions[1].tau_row = IncrementRow::new(0.5, 0.3, 0.2);
        let err = validate_scenario(s).unwrap_err();
        assert_eq!(err.path(), Some("/scenario/actions/1/tau_row/2"));
    }

    #[test]
    fn effectiveness_order_is_enforced() {
        let mut s = base();
        // M2 riskier than M1.
        s.actions[1].phi_row = IncrementRow::new(0.0, 0.2, 0.8);
        let err = validate_scenario(s).unwrap_err();
        assert_eq!(err.path(), Some("/scenario/actions/1/phi_row/2"));
    }

    #[test]
    fn state_index_round_trips() {
        let space = StateSpace::new(10, 7);
        for (i, s) in space.iter().enumerate() {
            assert_eq!(space.index(&s), i);
        }
        assert_eq!(space.len(), 2 * 11 * 8);
        assert!(!space.contains(&State::new(0, 11, 0)));
        assert!(!space.contains(&State::new(2, 0, 0)));
    }
}
