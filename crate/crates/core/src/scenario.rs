//! Scenario files: a state, a wiring, and what to write.
//!
//! The format is pretty-printed JSON with a `version` field. Unknown fields
//! are rejected, and a canonical file reserializes to the same bytes.
//!
//! ```json
//! {
//!   "version": 1,
//!   "name": "three-copy",
//!   "state": { "name": "werner_w", "param": { "grid": { "start": 0.0, "end": 1.0, "points": 201 } } },
//!   "wiring": { "copies": 3, "assignments": [ { "witness": "W1", "slots": ["A1", "B2"] } ] },
//!   "outputs": ["csv", "json"],
//!   "seed": 0
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::detection::{sweep_fn, Assignment, Slot, Threshold, WiringSpec, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::format::{to_csv, to_json};
use crate::multipartite::MultipartiteOperator;
use crate::states::{FixedState, StateFamily};
use crate::witnesses::{catalog, WitnessName};

pub const FORMAT_VERSION: u32 = 1;
pub const MAX_GRID_POINTS: usize = 100_001;
pub const MAX_WITNESS_VALUES: usize = 1_000;

/// Shipped scenarios as `(name, contents)`.
pub const CANONICAL: &[(&str, &str)] = &[
    ("ex1_fig1", include_str!("../scenarios/ex1_fig1.json")),
    ("ex2_cross", include_str!("../scenarios/ex2_cross.json")),
    ("ex2_local", include_str!("../scenarios/ex2_local.json")),
    ("ex3_cyclic", include_str!("../scenarios/ex3_cyclic.json")),
    ("ex4_p_w3", include_str!("../scenarios/ex4_p_w3.json")),
    ("fig4_pb_w3", include_str!("../scenarios/fig4_pb_w3.json")),
    ("ex5_cross", include_str!("../scenarios/ex5_cross.json")),
    ("ex5_ww1", include_str!("../scenarios/ex5_ww1.json")),
    ("ghz_cross", include_str!("../scenarios/ghz_cross.json")),
    ("ghz_local", include_str!("../scenarios/ghz_local.json")),
    ("degenerate", include_str!("../scenarios/degenerate.json")),
];

pub fn canonical(name: &str) -> Result<Scenario> {
    let (_, text) = CANONICAL
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::UnknownName {
            kind: "scenario",
            name: name.to_string(),
        })?;
    Scenario::parse(text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub name: String,
    pub state: StateSpec,
    pub wiring: WiringDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_param: Option<WitnessParam>,
    pub outputs: Vec<OutputFormat>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<ParamSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ParamSpec {
    Value(f64),
    Grid(GridSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WiringDoc {
    pub copies: usize,
    pub assignments: Vec<AssignmentDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentDoc {
    pub witness: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    pub slots: Vec<String>,
}

/// A second grid axis over the `b` of every `Pb` assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessParam {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// The state a scenario evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolvedState {
    Fixed(FixedState),
    Family(StateFamily, ParamSpec),
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Scenario(msg.into())
}

impl Scenario {
    /// Parses and validates. Syntax errors carry a line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| Error::ScenarioParse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Canonical text: pretty JSON with a trailing newline.
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != FORMAT_VERSION {
            return Err(invalid(format!(
                "unsupported version {} (expected {FORMAT_VERSION})",
                self.version
            )));
        }
        if self.name.trim().is_empty() {
            return Err(invalid("name is empty"));
        }
        if self.outputs.is_empty() {
            return Err(invalid("outputs is empty"));
        }
        self.resolve_state()?;
        let wp = self.witness_param.as_ref();
        if let Some(wp) = wp {
            if wp.name != "b" {
                return Err(invalid(format!("unknown witness parameter `{}`", wp.name)));
            }
            if wp.values.is_empty() {
                return Err(invalid("witness_param.values is empty"));
            }
            if wp.values.len() > MAX_WITNESS_VALUES {
                return Err(invalid(format!("more than {MAX_WITNESS_VALUES} witness_param values")));
            }
            if !self.wiring.assignments.iter().any(|a| a.witness == "Pb") {
                return Err(invalid("witness_param needs a Pb assignment"));
            }
            if self.wiring.assignments.iter().any(|a| a.b.is_some()) {
                return Err(invalid("b is set both per assignment and in witness_param"));
            }
            for &b in &wp.values {
                self.wiring(Some(b))?;
            }
        } else {
            self.wiring(None)?;
        }
        Ok(())
    }

    pub fn resolve_state(&self) -> Result<ResolvedState> {
        if let Ok(fixed) = self.state.name.parse::<FixedState>() {
            if self.state.param.is_some() {
                return Err(invalid(format!("state `{}` takes no param", self.state.name)));
            }
            return Ok(ResolvedState::Fixed(fixed));
        }
        let family: StateFamily = self.state.name.parse()?;
        let param = self
            .state
            .param
            .ok_or_else(|| invalid(format!("state `{}` needs a param", self.state.name)))?;
        let (lo, hi) = family.param_range();
        let in_range = |x: f64| x.is_finite() && (lo..=hi).contains(&x);
        match param {
            ParamSpec::Value(x) if !in_range(x) => {
                return Err(invalid(format!("param {x} outside [{lo}, {hi}]")));
            }
            ParamSpec::Grid(g) => {
                if !in_range(g.start) || !in_range(g.end) || g.start >= g.end {
                    return Err(invalid(format!(
                        "grid [{}, {}] is not inside [{lo}, {hi}]",
                        g.start, g.end
                    )));
                }
                if !(2..=MAX_GRID_POINTS).contains(&g.points) {
                    return Err(invalid(format!("grid needs 2 to {MAX_GRID_POINTS} points")));
                }
            }
            _ => {}
        }
        Ok(ResolvedState::Family(family, param))
    }

    fn base_shape(&self) -> Result<crate::multipartite::SubsystemShape> {
        Ok(match self.resolve_state()? {
            ResolvedState::Fixed(f) => f.state().shape().clone(),
            ResolvedState::Family(f, _) => f.shape(),
        })
    }

    /// Builds the wiring, substituting `b` into every `Pb` assignment when
    /// given.
    pub fn wiring(&self, b: Option<f64>) -> Result<WiringSpec> {
        let assignments = self
            .wiring
            .assignments
            .iter()
            .map(|a| {
                let name: WitnessName = a.witness.parse()?;
                let spec = catalog(name, a.b.or(b))?;
                let slots = a.slots.iter().map(|l| l.parse()).collect::<Result<Vec<Slot>>>()?;
                Ok(Assignment {
                    label: spec.name,
                    operator: spec.operator,
                    slots,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        WiringSpec::new(self.wiring.copies, self.base_shape()?, assignments)
    }

    /// Evaluates the scenario. `points` overrides the grid size.
    pub fn run(&self, points: Option<usize>) -> Result<ScenarioOutput> {
        self.evaluate(points)
            .map_err(|e| invalid(format!("{}: {e}", self.name)))
    }

    fn evaluate(&self, points: Option<usize>) -> Result<ScenarioOutput> {
        let state = self.resolve_state()?;
        let b_values: Vec<Option<f64>> = match &self.witness_param {
            Some(wp) => wp.values.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        let two_d = self.witness_param.is_some();

        let mut slices = Vec::new();
        for &b in &b_values {
            let wiring = self.wiring(b)?;
            let op = wiring.assemble()?;
            let slice = match state {
                ResolvedState::Fixed(f) => Slice {
                    b,
                    wiring: wiring.label(),
                    grid: vec![(f64::NAN, expectation(&wiring, &op, &f.state())?)],
                    thresholds: Vec::new(),
                },
                ResolvedState::Family(family, ParamSpec::Value(x)) => Slice {
                    b,
                    wiring: wiring.label(),
                    grid: vec![(x, expectation(&wiring, &op, &family.state(x)?)?)],
                    thresholds: Vec::new(),
                },
                ResolvedState::Family(family, ParamSpec::Grid(g)) => {
                    let n = points.unwrap_or(g.points);
                    let f = |x: f64| expectation(&wiring, &op, &family.state(x)?);
                    let (grid, thresholds) = sweep_fn(f, (g.start, g.end), n, DEFAULT_TOL)?;
                    Slice {
                        b,
                        wiring: wiring.label(),
                        grid,
                        thresholds,
                    }
                }
            };
            slices.push(slice);
        }

        let param_name = match state {
            ResolvedState::Fixed(_) => None,
            ResolvedState::Family(f, _) => Some(f.param_name().to_string()),
        };
        let csv = match (&state, two_d) {
            (ResolvedState::Fixed(_), _) => {
                let rows: Vec<Vec<f64>> = slices.iter().map(|s| vec![s.grid[0].1]).collect();
                to_csv(&["value"], &rows)
            }
            (ResolvedState::Family(..), false) => {
                let rows: Vec<Vec<f64>> = slices[0].grid.iter().map(|&(x, v)| vec![x, v]).collect();
                to_csv(&["param", "value"], &rows)
            }
            (ResolvedState::Family(f, _), true) => {
                let mut rows = Vec::new();
                for i in 0..slices[0].grid.len() {
                    for s in &slices {
                        let (x, v) = s.grid[i];
                        rows.push(vec![x, s.b.expect("b is set on every slice"), v]);
                    }
                }
                to_csv(&[f.param_name(), "b", "value"], &rows)
            }
        };

        let report = ScenarioReport {
            name: self.name.clone(),
            state: self.state.name.clone(),
            param_name,
            copies: self.wiring.copies,
            seed: self.seed,
            results: slices
                .iter()
                .map(|s| SliceReport {
                    b: s.b,
                    wiring: s.wiring.clone(),
                    points: s.grid.len(),
                    value: (s.grid.len() == 1).then(|| s.grid[0].1),
                    thresholds: s.thresholds.clone(),
                })
                .collect(),
        };
        Ok(ScenarioOutput { csv, report })
    }
}

fn expectation(wiring: &WiringSpec, op: &MultipartiteOperator, rho: &MultipartiteOperator) -> Result<f64> {
    crate::detection::expectation_with(wiring, op, rho)
}

struct Slice {
    b: Option<f64>,
    wiring: String,
    grid: Vec<(f64, f64)>,
    thresholds: Vec<Threshold>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    pub wiring: String,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub thresholds: Vec<Threshold>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub state: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param_name: Option<String>,
    pub copies: usize,
    pub seed: u64,
    pub results: Vec<SliceReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub csv: String,
    pub report: ScenarioReport,
}

impl ScenarioOutput {
    pub fn json(&self) -> Result<String> {
        to_json(&self.report)
    }
}
