//! Multi-copy witness wirings: assembly, expectation values, parameter
//! sweeps, and sign-change thresholds.

mod closed_form;
mod threshold;
mod wiring;

pub use closed_form::{app_d_b_root, ClosedForm};
pub use threshold::{find_threshold, NegativeSide, Threshold, DEFAULT_TOL, ZERO_TOL};
pub use wiring::{Assignment, Slot, WiringSpec, IMAGINARY_TOL};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multipartite::MultipartiteOperator;
use crate::states::StateFamily;
use crate::witnesses::WitnessSpec;

pub const DEFAULT_GRID_POINTS: usize = 201;

/// `(parameter, value)` pairs in grid order.
pub type Grid = Vec<(f64, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub family: String,
    pub param_name: String,
    pub wiring: String,
    pub grid: Grid,
    pub thresholds: Vec<Threshold>,
}

/// `points` evenly spaced values on `[lo, hi]`, endpoints included.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let span = hi - lo;
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                lo + span * i as f64 / (points - 1) as f64
            }
        })
        .collect()
}

/// Evaluates `f` on a uniform grid and bisects every sign change.
///
/// Grid values within `1e-12` of zero count as nonnegative, so a function
/// that only touches zero does not produce a threshold.
pub fn sweep_fn<F>(f: F, range: (f64, f64), grid_points: usize, tol: f64) -> Result<(Grid, Vec<Threshold>)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if grid_points < 2 {
        return Err(Error::Unsupported(format!(
            "{grid_points} grid points; need at least 2"
        )));
    }
    let xs = uniform_grid(range.0, range.1, grid_points);
    let values: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let negative = |v: f64| v < -ZERO_TOL;
    let mut thresholds = Vec::new();
    for i in 0..grid_points - 1 {
        if negative(values[i]) != negative(values[i + 1]) {
            thresholds.push(find_threshold(&f, (xs[i], xs[i + 1]), tol)?);
        }
    }
    Ok((xs.into_iter().zip(values).collect(), thresholds))
}

/// Scans `wiring` over the parameter range of `family`.
pub fn sweep(wiring: &WiringSpec, family: StateFamily, grid_points: usize) -> Result<DetectionReport> {
    let op = wiring.assemble()?;
    let f = |x: f64| expectation_with(wiring, &op, &family.state(x)?);
    let (grid, thresholds) = sweep_fn(f, family.param_range(), grid_points, DEFAULT_TOL)?;
    Ok(DetectionReport {
        family: family.name().to_string(),
        param_name: family.param_name().to_string(),
        wiring: wiring.label(),
        grid,
        thresholds,
    })
}

/// `Tr(op rho^{(x)k})` with an already assembled wiring operator.
pub fn expectation_with(wiring: &WiringSpec, op: &MultipartiteOperator, rho: &MultipartiteOperator) -> Result<f64> {
    if rho.shape() != wiring.base_shape() {
        return Err(Error::InvalidShape(format!(
            "state shape {:?} does not match wiring base shape {:?}",
            rho.shape().dims(),
            wiring.base_shape().dims()
        )));
    }
    let power = rho.tensor_power(wiring.copies())?;
    let z = op.matrix().trace_product(power.matrix())?;
    if z.im.abs() > IMAGINARY_TOL {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

/// Slot tuples to be filled with every combination of witnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingTemplate {
    pub name: String,
    pub copies: usize,
    pub slot_tuples: Vec<Vec<Slot>>,
}

impl OrderingTemplate {
    pub fn parse(name: &str, copies: usize, tuples: &[&[&str]]) -> Result<Self> {
        let slot_tuples = tuples
            .iter()
            .map(|t| t.iter().map(|l| l.parse()).collect::<Result<Vec<Slot>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: name.to_string(),
            copies,
            slot_tuples,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingEntry {
    pub ordering: String,
    pub witnesses: Vec<String>,
    pub wiring: String,
    pub value: f64,
}

/// Every assignment of `witnesses` to the tuples of every template,
/// evaluated on `rho`. Rows are ordered by template, then lexicographically
/// by witness index.
pub fn ordering_table(
    witnesses: &[WitnessSpec],
    rho: &MultipartiteOperator,
    templates: &[OrderingTemplate],
) -> Result<Vec<OrderingEntry>> {
    let mut jobs = Vec::new();
    for template in templates {
        let k = template.slot_tuples.len();
        let total = witnesses.len().pow(k as u32);
        for combo in 0..total {
            let mut digits = vec![0; k];
            let mut rest = combo;
            for d in digits.iter_mut().rev() {
                *d = rest % witnesses.len();
                rest /= witnesses.len();
            }
            let assignments = digits
                .iter()
                .zip(&template.slot_tuples)
                .map(|(&w, slots)| Assignment {
                    label: witnesses[w].name.clone(),
                    operator: witnesses[w].operator.clone(),
                    slots: slots.clone(),
                })
                .collect();
            let wiring = WiringSpec::new(template.copies, rho.shape().clone(), assignments)?;
            jobs.push((template.name.clone(), digits, wiring));
        }
    }
    jobs.into_par_iter()
        .map(|(ordering, digits, wiring)| {
            Ok(OrderingEntry {
                ordering,
                witnesses: digits.iter().map(|&w| witnesses[w].name.clone()).collect(),
                wiring: wiring.label(),
                value: wiring.expectation(rho)?,
            })
        })
        .collect()
}

/// [`ordering_table`] for a member of a state family.
pub fn ordering_matrix(
    witnesses: &[WitnessSpec],
    family: StateFamily,
    param: f64,
    templates: &[OrderingTemplate],
) -> Result<Vec<OrderingEntry>> {
    ordering_table(witnesses, &family.state(param)?, templates)
}
