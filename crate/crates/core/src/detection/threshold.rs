use serde::Serialize;

use crate::error::{Error, Result};

/// Default bracket width for bisection.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Values this close to zero are treated as roots rather than signs.
pub const ZERO_TOL: f64 = 1e-12;

/// Which side of the root the function is negative on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NegativeSide {
    Below,
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    pub root: f64,
    pub bracket: (f64, f64),
    pub value_at_root: f64,
    pub negative_side: NegativeSide,
}

/// Bisection on `[lo, hi]` down to a bracket no wider than `tol`.
///
/// An endpoint with `|f| <= 1e-12` is returned directly as the root.
pub fn find_threshold<F>(f: F, bracket: (f64, f64), tol: f64) -> Result<Threshold>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = bracket;
    if lo.is_nan() || hi.is_nan() || lo > hi || tol.is_nan() || tol <= 0.0 {
        return Err(Error::Unsupported(format!(
            "bad bracket [{lo}, {hi}] or tolerance {tol}"
        )));
    }
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    if f_lo.abs() <= ZERO_TOL || f_hi.abs() <= ZERO_TOL {
        let (root, value) = if f_lo.abs() <= f_hi.abs() {
            (lo, f_lo)
        } else {
            (hi, f_hi)
        };
        let negative_side = if f_lo < f_hi {
            NegativeSide::Below
        } else {
            NegativeSide::Above
        };
        return Ok(Threshold {
            root,
            bracket: (root, root),
            value_at_root: value,
            negative_side,
        });
    }
    if (f_lo < 0.0) == (f_hi < 0.0) {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let negative_side = if f_lo < 0.0 {
        NegativeSide::Below
    } else {
        NegativeSide::Above
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            f_lo = 0.0;
            f_hi = 0.0;
            break;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let value_at_root = if lo == hi { f_lo.min(f_hi) } else { f(root)? };
    Ok(Threshold {
        root,
        bracket: (lo, hi),
        value_at_root,
        negative_side,
    })
}
