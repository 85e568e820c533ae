//! Read-only summaries of solved policies: action counts, diffs between
//! solutions, tie contiguity and exportable grids.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::error::ModelError;
use crate::model::State;
use crate::solver::Solution;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("solutions differ in shape: {0}")]
    Shape(String),
}

/// Canonical-action counts over the `(phi, tau)` grid at period `t` and
/// history `h`. With `exclude_absorbing`, death and remission cells are
/// skipped.
pub fn action_proportions(solution: &Solution, t: usize, h: u8, exclude_absorbing: bool) -> Vec<usize> {
    let space = solution.space();
    let mut counts = vec![0; solution.num_actions()];
    for s in space.iter().filter(|s| s.h == h) {
        if exclude_absorbing && space.is_absorbing(&s) {
            continue;
        }
        counts[solution.canonical_action(t, &s)] += 1;
    }
    counts
}

/// Counts at period `t` summed over both history values.
pub fn period_counts(solution: &Solution, t: usize, exclude_absorbing: bool) -> Vec<usize> {
    let mut counts = action_proportions(solution, t, 0, exclude_absorbing);
    for (c, d) in counts.iter_mut().zip(action_proportions(solution, t, 1, exclude_absorbing)) {
        *c += d;
    }
    counts
}

/// Per-period counts for each history value, with and without absorbing cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProportionRow {
    pub t: usize,
    pub h: u8,
    pub all_states: Vec<usize>,
    pub non_absorbing: Vec<usize>,
}

pub fn proportion_report(solution: &Solution) -> Vec<ProportionRow> {
    let mut rows = Vec::new();
    for t in 1..=solution.horizon() {
        for h in 0..=1 {
            rows.push(ProportionRow {
                t,
                h,
                all_states: action_proportions(solution, t, h, false),
                non_absorbing: action_proportions(solution, t, h, true),
            });
        }
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PolicyChange {
    pub t: usize,
    pub state: State,
    pub from: usize,
    pub to: usize,
}

/// Every `(t, state)` whose canonical action differs, in `(t, state)` order.
pub fn policy_diff(a: &Solution, b: &Solution) -> Result<Vec<PolicyChange>, AnalysisError> {
    if !a.same_shape(b) {
        return Err(AnalysisError::Shape(format!(
            "T = {} vs {}, (m, n) = ({}, {}) vs ({}, {}), {} vs {} actions",
            a.horizon(),
            b.horizon(),
            a.space().m,
            a.space().n,
            b.space().m,
            b.space().n,
            a.num_actions(),
            b.num_actions()
        )));
    }
    let mut changes = Vec::new();
    for t in 1..=a.horizon() {
        for state in a.space().iter() {
            let (from, to) = (a.canonical_action(t, &state), b.canonical_action(t, &state));
            if from != to {
                changes.push(PolicyChange { t, state, from, to });
            }
        }
    }
    Ok(changes)
}

/// `(t, state)` pairs whose argmax set is not a run of consecutive actions.
pub fn contiguity_check(solution: &Solution) -> Vec<(usize, State)> {
    let mut violations = Vec::new();
    for t in 1..=solution.horizon() {
        for state in solution.space().iter() {
            if !solution.argmax_set(t, &state).is_contiguous() {
                violations.push((t, state));
            }
        }
    }
    violations
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridCell {
    pub action: usize,
    pub argmax: Vec<usize>,
}

/// Canonical actions over `(phi, tau)` for one period and history value.
/// `cells[phi][tau]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolicyGrid {
    pub t: usize,
    pub h: u8,
    pub actions: Vec<String>,
    pub cells: Vec<Vec<GridCell>>,
}

pub fn export_policy_grid(solution: &Solution, t: usize, h: u8) -> Result<PolicyGrid, ModelError> {
    if !(1..=solution.horizon()).contains(&t) || h > 1 {
        return Err(ModelError::Domain(format!(
            "grid (t = {t}, h = {h}) outside t in 1..={}, h in {{0,1}}",
            solution.horizon()
        )));
    }
    let space = solution.space();
    let cells = (0..=space.m)
        .map(|phi| {
            (0..=space.n)
                .map(|tau| {
                    let s = State::new(h, phi, tau);
                    GridCell {
                        action: solution.canonical_action(t, &s),
                        argmax: solution.argmax_set(t, &s).iter().collect(),
                    }
                })
                .collect()
        })
        .collect();
    Ok(PolicyGrid {
        t,
        h,
        actions: solution.action_names().to_vec(),
        cells,
    })
}

impl PolicyGrid {
    pub fn count(&self, action: usize) -> usize {
        self.cells.iter().flatten().filter(|c| c.action == action).count()
    }

    /// Text map with side effect increasing upwards and tumor progression to
    /// the right; tied cells carry a `*`.
    pub fn render(&self) -> String {
        let width = self.actions.iter().map(String::len).max().unwrap_or(1) + 2;
        let mut out = format!("t={} h={}  (rows: phi, columns: tau)\n", self.t, self.h);
        for (phi, row) in self.cells.iter().enumerate().rev() {
            let _ = write!(out, "{phi:>3} |");
            for cell in row {
                let mark = if cell.argmax.len() > 1 { "*" } else { "" };
                let label = format!("{}{mark}", self.actions[cell.action]);
                let _ = write!(out, "{label:>width$}");
            }
            out.push('\n');
        }
        let _ = write!(out, "    +{}\n     ", "-".repeat(width * self.cells[0].len()));
        for tau in 0..self.cells[0].len() {
            let _ = write!(out, "{tau:>width$}");
        }
        out.push('\n');
        out
    }
}
