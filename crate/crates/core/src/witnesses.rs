//! Catalog of witnesses and positive operators, with sampled validity checks.
//!
//! The sampled product-state minimum is an upper bound on the true minimum
//! over separable states, not a proof of witness validity.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{c, vec_norm, ComplexMatrix};
use crate::multipartite::{MultipartiteOperator, SubsystemShape};
use crate::states::{bell, product_state, w_state, Bell};

/// Threshold below which an eigenvalue or expectation counts as negative.
pub const NEGATIVITY_TOL: f64 = 1e-9;

/// Independent RNG streams used by the sampler. Fixed so results do not
/// depend on the thread count.
const SAMPLE_STREAMS: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WitnessName {
    /// `1 - X(x)X + Z(x)Z`
    W,
    /// `2 |phi+><phi+|^{T_2}`
    V,
    /// `1 + X(x)X - Y(x)Y`
    W1,
    /// `2 |psi-><psi-|^{T_2}`
    W2,
    /// `2 |psi+><psi+|^{T_2}`
    W3,
    /// `1 - Z(x)Z - X(x)X`
    W4,
    /// Fixed positive operator used with `W3` on `rho_a`.
    P,
    /// One-parameter positive family, `b >= 1`.
    Pb,
    /// Three-qubit witness `2/3 1 - |W><W|`.
    WW1,
}

impl WitnessName {
    pub const ALL: [WitnessName; 9] = [
        Self::W,
        Self::V,
        Self::W1,
        Self::W2,
        Self::W3,
        Self::W4,
        Self::P,
        Self::Pb,
        Self::WW1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::W => "W",
            Self::V => "V",
            Self::W1 => "W1",
            Self::W2 => "W2",
            Self::W3 => "W3",
            Self::W4 => "W4",
            Self::P => "P",
            Self::Pb => "Pb",
            Self::WW1 => "WW1",
        }
    }

    pub fn kind(self) -> WitnessKind {
        match self {
            Self::P | Self::Pb => WitnessKind::PositiveSemidefinite,
            _ => WitnessKind::Witness,
        }
    }

    pub fn num_parties(self) -> usize {
        match self {
            Self::WW1 => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for WitnessName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WitnessName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|w| w.as_str() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "witness",
                name: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    Witness,
    PositiveSemidefinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSpec {
    pub name: String,
    pub operator: MultipartiteOperator,
    pub kind: WitnessKind,
}

fn partial_transposed_bell(which: Bell, factor: f64) -> MultipartiteOperator {
    bell(which, 2)
        .unwrap()
        .density()
        .partial_transpose(&[1])
        .unwrap()
        .scale_real(factor)
}

fn qubit_op(m: ComplexMatrix) -> MultipartiteOperator {
    MultipartiteOperator::qubits(m).expect("qubit operator")
}

/// `(1/(4b)) [[1,0,0,-1],[0,2b,-2b,0],[0,-2b,2b,0],[-1,0,0,1]]`.
fn p_family(b: f64) -> ComplexMatrix {
    let tb = 2.0 * b;
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, -1.0],
        &[0.0, tb, -tb, 0.0],
        &[0.0, -tb, tb, 0.0],
        &[-1.0, 0.0, 0.0, 1.0],
    ])
    .unwrap()
    .scale_real(1.0 / (4.0 * b))
}

/// Builds a catalog operator. `b` is required for `Pb` and ignored otherwise.
pub fn catalog(name: WitnessName, b: Option<f64>) -> Result<WitnessSpec> {
    let x = ComplexMatrix::pauli_x();
    let y = ComplexMatrix::pauli_y();
    let z = ComplexMatrix::pauli_z();
    let id4 = ComplexMatrix::identity(4);
    let xx = x.kron(&x);
    let yy = y.kron(&y);
    let zz = z.kron(&z);

    let operator = match name {
        WitnessName::W => qubit_op(id4.sub(&xx)?.add(&zz)?),
        WitnessName::V => partial_transposed_bell(Bell::PhiPlus, 2.0),
        WitnessName::W1 => qubit_op(id4.add(&xx)?.sub(&yy)?),
        WitnessName::W2 => partial_transposed_bell(Bell::PsiMinus, 2.0),
        WitnessName::W3 => partial_transposed_bell(Bell::PsiPlus, 2.0),
        WitnessName::W4 => qubit_op(id4.sub(&zz)?.sub(&xx)?),
        WitnessName::P => qubit_op(p_family(1.0).scale_real(4.0)),
        WitnessName::Pb => {
            let b = b.ok_or_else(|| Error::Unsupported("Pb requires a value for b".into()))?;
            if !(b.is_finite() && b >= 1.0) {
                return Err(Error::ParameterOutOfRange {
                    name: "b",
                    value: b,
                    lo: 1.0,
                    hi: f64::INFINITY,
                });
            }
            qubit_op(p_family(b))
        }
        WitnessName::WW1 => {
            let proj = w_state().density();
            qubit_op(ComplexMatrix::identity(8).scale_real(2.0 / 3.0).sub(proj.matrix())?)
        }
    };
    let label = match (name, b) {
        (WitnessName::Pb, Some(b)) => format!("Pb(b={b})"),
        _ => name.as_str().to_string(),
    };
    Ok(WitnessSpec {
        name: label,
        operator,
        kind: name.kind(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub name: String,
    pub kind: WitnessKind,
    pub min_eigenvalue: f64,
    pub min_product_expectation: f64,
    pub samples: usize,
    pub passed: bool,
}

/// Checks a catalog entry: a witness needs a negative eigenvalue and no
/// sampled product state below `-1e-9`; a positive operator needs a
/// nonnegative spectrum.
pub fn validate_witness(spec: &WitnessSpec, samples: usize, seed: u64) -> Result<ValidationReport> {
    let min_eigenvalue = spec.operator.matrix().min_eigenvalue()?;
    let min_product_expectation = min_product_expectation(&spec.operator, spec.operator.shape(), samples.max(1), seed)?;
    let passed = match spec.kind {
        WitnessKind::Witness => min_eigenvalue < -NEGATIVITY_TOL && min_product_expectation >= -NEGATIVITY_TOL,
        WitnessKind::PositiveSemidefinite => min_eigenvalue >= -NEGATIVITY_TOL,
    };
    Ok(ValidationReport {
        name: spec.name.clone(),
        kind: spec.kind,
        min_eigenvalue,
        min_product_expectation,
        samples: samples.max(1),
        passed,
    })
}

/// A Haar-random pure state: normalized vector of standard complex Gaussians.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = vec_norm(&v);
        if norm > 1e-12 {
            return v.iter().map(|z| z / norm).collect();
        }
    }
}

/// A random pure product state over `shape`, one Haar factor per slot.
pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R, shape: &SubsystemShape) -> Vec<Complex64> {
    let locals: Vec<_> = shape.dims().iter().map(|&d| random_pure_state(rng, d)).collect();
    product_state(&locals)
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Minimum of `<psi|W|psi>` over `samples` random pure product states on
/// `dims`. An upper bound on the separable minimum of `Tr(W rho)`.
pub fn min_product_expectation(
    w: &MultipartiteOperator,
    dims: &SubsystemShape,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if dims.total_dim() != w.matrix().dim() {
        return Err(Error::DimensionMismatch {
            op: "min_product_expectation",
            left: w.matrix().dim(),
            right: dims.total_dim(),
        });
    }
    let samples = samples.max(1) as u64;
    let per_stream = samples.div_ceil(SAMPLE_STREAMS);
    let minima: Vec<Result<f64>> = (0..SAMPLE_STREAMS)
        .into_par_iter()
        .map(|stream| {
            let start = stream * per_stream;
            let count = per_stream.min(samples.saturating_sub(start));
            let mut rng = stream_rng(seed, stream);
            let mut best = f64::INFINITY;
            for _ in 0..count {
                let v = random_product_state(&mut rng, dims);
                best = best.min(w.matrix().quadratic_form(&v)?.re);
            }
            Ok(best)
        })
        .collect();
    minima.into_iter().try_fold(f64::INFINITY, |acc, m| Ok(acc.min(m?)))
}
