//! Locale-independent numeric output.
//!
//! Every number written to CSV or JSON goes through [`fmt_f64`] or
//! [`round15`] so that output is byte-stable across platforms.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 15;

/// Formats `x` with 15 significant digits and `.` as the decimal separator.
///
/// Plain notation is used for decimal exponents in `[-5, 15)` and scientific
/// notation otherwise. Trailing zeros after the point are dropped.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.into()
    }
}

/// `x` rounded to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("round trip of formatted float")
}

/// Rounds every number in a JSON tree to 15 significant digits.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(r) = n.as_f64().map(round15).and_then(serde_json::Number::from_f64) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with rounded numbers and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut tree = serde_json::to_value(value).map_err(|e| Error::Unsupported(e.to_string()))?;
    round_json(&mut tree);
    let mut out = serde_json::to_string_pretty(&tree).map_err(|e| Error::Unsupported(e.to_string()))?;
    out.push('\n');
    Ok(out)
}

/// CSV with a header line and one formatted row per entry.
pub fn to_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
