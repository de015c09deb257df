//! Closed-form trace polynomials, used as cross-checks against the dense
//! evaluation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedForm {
    /// Three-copy cyclic wiring `W1[A1,B2] W2[A2,B3] W3[B1,A3]` on `rho_w`.
    AppC,
    /// `P[A,B'] W3[B,A']` on `rho_a`: `(3 - 5a^2)/4`.
    AppD,
    /// `Pb[A,B'] W3[B,A']` on `rho_a`: `((1 - 6b)a^2 + 2b + 1)/(16b)`.
    AppDb,
    /// Single-copy `2/3 1 - |W><W|` on `rho_c`: `7c/8 - 1/3`.
    AppEWW1,
    /// The published polynomial for `W4[A,B'] W3[B,C'] W3[C,A']` on `rho_c`.
    /// Nonnegative on `[0, 1]`; it does not match the dense trace and is kept
    /// only so reports can show the mismatch.
    AppEPrinted,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 5] = [Self::AppC, Self::AppD, Self::AppDb, Self::AppEWW1, Self::AppEPrinted];

    pub fn name(self) -> &'static str {
        match self {
            Self::AppC => "appC",
            Self::AppD => "appD",
            Self::AppDb => "appD_b",
            Self::AppEWW1 => "appE_WW1",
            Self::AppEPrinted => "appE_printed",
        }
    }

    pub fn evaluate(self, param: f64, b: Option<f64>) -> Result<f64> {
        if !(0.0..=1.0).contains(&param) {
            return Err(Error::ParameterOutOfRange {
                name: "param",
                value: param,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(match self {
            Self::AppC => {
                let w = param;
                2.0 * ((2.0 - w) / 4.0).powi(3) - 4.0 * ((1.0 - w) / 2.0).powi(3)
                    + 6.0 * w * (2.0 - w).powi(2) / 64.0
                    + 6.0 * w * w * (2.0 - w) / 64.0
                    + 2.0 * w.powi(3) / 64.0
            }
            Self::AppD => (3.0 - 5.0 * param * param) / 4.0,
            Self::AppDb => {
                let b = b.ok_or_else(|| Error::Unsupported("appD_b requires b".into()))?;
                if !(b.is_finite() && b >= 1.0) {
                    return Err(Error::ParameterOutOfRange {
                        name: "b",
                        value: b,
                        lo: 1.0,
                        hi: f64::INFINITY,
                    });
                }
                ((1.0 - 6.0 * b) * param * param + 2.0 * b + 1.0) / (16.0 * b)
            }
            Self::AppEWW1 => 7.0 * param / 8.0 - 1.0 / 3.0,
            Self::AppEPrinted => {
                let c = param;
                2.0 * (c / 8.0).powi(2) + 12.0 * (c / 8.0) * (8.0 - 5.0 * c) / 24.0 + 4.0 * ((1.0 - c) / 3.0).powi(2)
            }
        })
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClosedForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|cf| cf.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "closed form",
                name: s.to_string(),
            })
    }
}

/// Root of [`ClosedForm::AppDb`] in `a`: `sqrt((2b + 1)/(6b - 1))`.
pub fn app_d_b_root(b: f64) -> f64 {
    ((2.0 * b + 1.0) / (6.0 * b - 1.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        assert!((ClosedForm::AppC.evaluate(0.0, None).unwrap() + 0.25).abs() < 1e-15);
        let root = (3.0f64 / 5.0).sqrt();
        assert!(ClosedForm::AppD.evaluate(root, None).unwrap().abs() < 1e-15);
        assert!((ClosedForm::AppDb.evaluate(0.0, Some(1.0)).unwrap() - 3.0 / 16.0).abs() < 1e-15);
        assert!(ClosedForm::AppEWW1.evaluate(8.0 / 21.0, None).unwrap().abs() < 1e-15);
    }

    #[test]
    fn db_at_one_matches_quarter_of_d() {
        for a in [0.0, 0.3, 0.77, 1.0] {
            let d = ClosedForm::AppD.evaluate(a, None).unwrap();
            let db = ClosedForm::AppDb.evaluate(a, Some(1.0)).unwrap();
            assert!((db - d / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn printed_appendix_e_form_never_goes_negative() {
        for i in 0..=1000 {
            let c = i as f64 / 1000.0;
            assert!(ClosedForm::AppEPrinted.evaluate(c, None).unwrap() > 0.0);
        }
    }

    #[test]
    fn errors() {
        assert!(ClosedForm::AppDb.evaluate(0.5, None).is_err());
        assert!(ClosedForm::AppDb.evaluate(0.5, Some(0.9)).is_err());
        assert!(ClosedForm::AppC.evaluate(1.2, None).is_err());
        assert!("appF".parse::<ClosedForm>().is_err());
        assert_eq!("appD_b".parse::<ClosedForm>().unwrap(), ClosedForm::AppDb);
    }

    #[test]
    fn b_roots() {
        assert!((app_d_b_root(1.0) - (3.0f64 / 5.0).sqrt()).abs() < 1e-15);
        assert!((app_d_b_root(100.0) - (201.0f64 / 599.0).sqrt()).abs() < 1e-15);
    }
}
