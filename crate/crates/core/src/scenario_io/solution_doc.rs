use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::{State, StateSpace};
use crate::solver::{ActionSet, Solution};

use super::{from_json, ScenarioIoError, SCHEMA_VERSION};

/// A float written as an integer when it is integral, otherwise as the
/// shortest decimal that round-trips.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Number(pub f64);

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.fract() == 0.0 && v.abs() < 9.0e15 && !(v == 0.0 && v.is_sign_negative()) {
            s.serialize_i64(v as i64)
        } else {
            s.serialize_f64(v)
        }
    }
}

impl<'de> Deserialize<'de> for Number {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        f64::deserialize(d).map(Number)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionEntry {
    pub t: usize,
    pub h: u8,
    pub phi: usize,
    pub tau: usize,
    #[serde(rename = "V")]
    pub value: Number,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub action_values: Option<Vec<Number>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub argmax: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDocument {
    pub schema_version: String,
    pub horizon: usize,
    pub m: usize,
    pub n: usize,
    pub actions: Vec<String>,
    pub tie_tolerance: f64,
    pub entries: Vec<SolutionEntry>,
}

#[derive(Serialize)]
struct Header<'a> {
    schema_version: &'a str,
    horizon: usize,
    m: usize,
    n: usize,
    actions: &'a [String],
    tie_tolerance: f64,
}

impl SolutionDocument {
    /// Entries ordered by `(t, h, phi, tau)`; the `T + 1` slice has values only.
    pub fn from_solution(solution: &Solution) -> Self {
        let space = solution.space();
        let names = solution.action_names();
        let mut entries = Vec::with_capacity((solution.horizon() + 1) * space.len());
        for t in 1..=solution.horizon() + 1 {
            for s in space.iter() {
                let decision = t <= solution.horizon();
                entries.push(SolutionEntry {
                    t,
                    h: s.h,
                    phi: s.phi,
                    tau: s.tau,
                    value: Number(solution.value(t, &s)),
                    action_values: decision
                        .then(|| solution.action_values(t, &s).iter().copied().map(Number).collect()),
                    argmax: decision.then(|| {
                        solution
                            .argmax_set(t, &s)
                            .iter()
                            .map(|a| names[a].clone())
                            .collect()
                    }),
                    action: decision.then(|| names[solution.canonical_action(t, &s)].clone()),
                });
            }
        }
        SolutionDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            horizon: solution.horizon(),
            m: space.m,
            n: space.n,
            actions: names.to_vec(),
            tie_tolerance: solution.tie_tolerance(),
            entries,
        }
    }

    /// Compact JSON with one entry per line.
    pub fn to_canonical_string(&self) -> String {
        let header = Header {
            schema_version: &self.schema_version,
            horizon: self.horizon,
            m: self.m,
            n: self.n,
            actions: &self.actions,
            tie_tolerance: self.tie_tolerance,
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.pop();
        out.push_str(",\"entries\":[");
        for (i, e) in self.entries.iter().enumerate() {
            out.push_str(if i == 0 { "\n" } else { ",\n" });
            out.push_str(&serde_json::to_string(e).expect("entries serialize"));
        }
        out.push_str("\n]}\n");
        out
    }

    pub fn to_solution(&self) -> Result<Solution, ScenarioIoError> {
        let bad = |path: String, msg: String| ScenarioIoError::at(path, msg);
        if self.schema_version != SCHEMA_VERSION {
            return Err(bad("/schema_version".into(), "unsupported schema version".into()));
        }
        if self.actions.is_empty() || self.actions.len() > 64 || self.horizon == 0 {
            return Err(bad("/actions".into(), "empty horizon or action list".into()));
        }
        let space = StateSpace::new(self.m, self.n);
        let (t_len, s_len, a_len) = (self.horizon, space.len(), self.actions.len());
        let mut values = vec![f64::NAN; (t_len + 1) * s_len];
        let mut q = vec![f64::NAN; t_len * s_len * a_len];
        let mut argmax = vec![ActionSet::empty(); t_len * s_len];
        let mut seen = vec![false; (t_len + 1) * s_len];
        let index_of = |name: &str, path: &str| {
            self.actions
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| bad(path.to_string(), format!("unknown action {name:?}")))
        };

        for (i, e) in self.entries.iter().enumerate() {
            let path = format!("/entries/{i}");
            let state = State::new(e.h, e.phi, e.tau);
            if !space.contains(&state) || !(1..=t_len + 1).contains(&e.t) {
                return Err(bad(path, "entry outside the state space or horizon".into()));
            }
            let slot = (e.t - 1) * s_len + space.index(&state);
            if std::mem::replace(&mut seen[slot], true) {
                return Err(bad(path, "duplicate entry".into()));
            }
            values[slot] = e.value.0;
            if e.t > t_len {
                continue;
            }
            let (Some(qs), Some(set)) = (&e.action_values, &e.argmax) else {
                return Err(bad(path, "decision entries need Q and argmax".into()));
            };
            if qs.len() != a_len {
                return Err(bad(format!("{path}/Q"), "wrong number of action values".into()));
            }
            for (a, v) in qs.iter().enumerate() {
                q[slot * a_len + a] = v.0;
            }
            for name in set {
                argmax[slot].insert(index_of(name, &format!("{path}/argmax"))?);
            }
            if let Some(action) = &e.action {
                let a = index_of(action, &format!("{path}/action"))?;
                if Some(a) != argmax[slot].last() {
                    return Err(bad(format!("{path}/action"), "not the least aggressive tied action".into()));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(bad(
                "/entries".into(),
                format!("missing entry for t = {}", missing / s_len + 1),
            ));
        }
        Ok(Solution::from_tables(
            self.horizon,
            space,
            self.actions.clone(),
            self.tie_tolerance,
            values,
            q,
            argmax,
        )?)
    }
}

pub fn serialize_solution(solution: &Solution) -> String {
    SolutionDocument::from_solution(solution).to_canonical_string()
}

pub fn parse_solution(text: &str) -> Result<Solution, ScenarioIoError> {
    from_json::<SolutionDocument>(text)?.to_solution()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reward::terminal_reward;
    use crate::scenario_io::preset;
    use crate::solver::solve;

    #[test]
    fn terminal_slice_is_terminal_reward() {
        let sc = preset("base").unwrap();
        let doc = SolutionDocument::from_solution(&solve(&sc).unwrap());
        let terminal: Vec<_> = doc.entries.iter().filter(|e| e.t == 4).collect();
        assert_eq!(terminal.len(), 242);
        for e in terminal {
            let r = terminal_reward(&State::new(e.h, e.phi, e.tau), &sc.reward, 10, 10).unwrap();
            assert_eq!(e.value.0, r);
            assert!(e.action.is_none());
        }
    }

    #[test]
    fn serialization_is_idempotent() {
        for name in ["base", "table5-four-actions", "inter-phi"] {
            let text = serialize_solution(&solve(&preset(name).unwrap()).unwrap());
            let again = serialize_solution(&parse_solution(&text).unwrap());
            assert_eq!(text, again);
        }
    }

    #[test]
    fn tiny_solution_contains_hand_value() {
        let mut sc = preset("base").unwrap();
        sc.horizon = 1;
        sc.m = 2;
        sc.n = 2;
        let text = serialize_solution(&solve(&sc).unwrap());
        let line = text
            .lines()
            .find(|l| l.starts_with(r#"{"t":1,"h":0,"phi":0,"tau":1,"#))
            .unwrap();
        assert!(line.contains(r#""V":90,"#), "{line}");
        assert!(line.contains(r#""action":"M2""#));
    }

    #[test]
    fn incomplete_documents_are_rejected() {
        let text = serialize_solution(&solve(&preset("base").unwrap()).unwrap());
        let mut doc: SolutionDocument = serde_json::from_str(&text).unwrap();
        doc.entries.pop();
        assert!(doc.to_solution().is_err());
        let mut doc: SolutionDocument = serde_json::from_str(&text).unwrap();
        doc.entries[0].action = Some("M1".into());
        assert!(doc.to_solution().is_err());
    }

    #[test]
    fn numbers_use_integer_form_when_integral() {
        assert_eq!(serde_json::to_string(&Number(90.0)).unwrap(), "90");
        assert_eq!(serde_json::to_string(&Number(88.75)).unwrap(), "88.75");
        assert_eq!(serde_json::to_string(&Number(0.1 + 0.2)).unwrap(), "0.30000000000000004");
    }
}
