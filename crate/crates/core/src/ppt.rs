//! Positive-partial-transpose test.
//!
//! A negative eigenvalue of the partial transpose certifies entanglement;
//! a nonnegative spectrum is inconclusive.

use crate::detection::{find_threshold, Threshold};
use crate::error::Result;
use crate::multipartite::MultipartiteOperator;
use crate::states::StateFamily;

/// Eigenvalues above this count as nonnegative. Sits above the eigensolver
/// residual.
pub const NPT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NptEntangled,
    PptInconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PptVerdict {
    pub min_eigenvalue: f64,
    pub transposed_slots: Vec<usize>,
    pub verdict: Verdict,
}

pub fn min_partial_transpose_eigenvalue(rho: &MultipartiteOperator, transposed_slots: &[usize]) -> Result<f64> {
    rho.partial_transpose(transposed_slots)?.matrix().min_eigenvalue()
}

pub fn ppt_check(rho: &MultipartiteOperator, transposed_slots: &[usize]) -> Result<PptVerdict> {
    rho.validate_density(1e-9)?;
    let min_eigenvalue = min_partial_transpose_eigenvalue(rho, transposed_slots)?;
    let verdict = if min_eigenvalue < -NPT_TOL {
        Verdict::NptEntangled
    } else {
        Verdict::PptInconclusive
    };
    Ok(PptVerdict {
        min_eigenvalue,
        transposed_slots: transposed_slots.to_vec(),
        verdict,
    })
}

/// Parameter at which the smallest partial-transpose eigenvalue of `family`
/// changes sign, by bisection over the family's range.
pub fn ppt_threshold(family: StateFamily, transposed_slots: &[usize], tol: f64) -> Result<Threshold> {
    find_threshold(
        |x| min_partial_transpose_eigenvalue(&family.state(x)?, transposed_slots),
        family.param_range(),
        tol,
    )
}
