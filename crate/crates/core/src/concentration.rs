//! Two-copy entanglement concentration.
//!
//! Two copies of `|phi> = (1 (x) Psi)|psi+>` are laid out on slots
//! `A B A' B'`. A rank-one measurement on `(B, A')` leaves `(A, B')` in
//! either `|phi>` again (kind `m`) or the maximally entangled `|psi+>`
//! (kind `M`).
//!
//! Two normalizations are tracked side by side. The physical one uses a
//! unit-norm `|phi>` and a normalized projector, giving a probability in
//! `(0, 1]`. The bookkeeping one uses `|psi+> = (1/sqrt d) sum |ii>` with
//! `Tr(Psi^dagger Psi) = 1`, so `|phi>` has norm `1/sqrt d`, and the
//! unnormalized measurement vectors; under it the reduced operator equals
//! the target projector divided by `d^2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c, vec_kron, vec_norm, ComplexMatrix};
use crate::multipartite::{MultipartiteOperator, SubsystemShape};
use crate::states::{bell, check_schmidt_operator, schmidt_state, Bell};
use crate::witnesses::stream_rng;

/// Measured slots `B` and `A'`, in that order.
const MEASURED_SLOTS: [usize; 2] = [1, 2];
const MIN_PROBABILITY: f64 = 1e-14;
const MAX_SAMPLE_CONDITION: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasurementKind {
    /// `|m> = (1 (x) (Psi*)^-1)|psi+>`; returns `|phi>` on `AB'`.
    Restore,
    /// `|M> = (1 (x) (Psi* Psi*)^-1)|psi+>`; returns `|psi+>` on `AB'`.
    Concentrate,
}

impl MeasurementKind {
    pub fn symbol(self) -> &'static str {
        match self {
            Self::Restore => "m",
            Self::Concentrate => "M",
        }
    }
}

impl fmt::Display for MeasurementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for MeasurementKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m" => Ok(Self::Restore),
            "M" => Ok(Self::Concentrate),
            _ => Err(Error::UnknownName {
                kind: "measurement kind",
                name: s.to_string(),
            }),
        }
    }
}

/// An unnormalized measurement vector on `(B, A')`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementVector {
    pub amplitudes: Vec<Complex64>,
    pub norm: f64,
}

/// `(K1 (x) K2)|psi+>` with `|psi+> = (1/sqrt d) sum |ii>`; amplitude
/// `(x, y)` is `(K1 K2^T)[x][y] / sqrt d`.
fn apply_to_bell(k1: &ComplexMatrix, k2: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let d = k1.dim();
    let m = k1.matmul(&k2.transpose())?;
    let s = 1.0 / (d as f64).sqrt();
    Ok(m.entries().iter().map(|z| z * s).collect())
}

pub fn measurement_vector(psi: &ComplexMatrix, kind: MeasurementKind) -> Result<MeasurementVector> {
    check_schmidt_operator(psi)?;
    let d = psi.dim();
    let id = ComplexMatrix::identity(d);
    let psi_conj = psi.conjugate();
    let amplitudes = match kind {
        MeasurementKind::Restore => apply_to_bell(&id, &psi_conj.inverse()?)?,
        MeasurementKind::Concentrate => {
            let direct = apply_to_bell(&id, &psi_conj.matmul(&psi_conj)?.inverse()?)?;
            let split = apply_to_bell(&psi.adjoint().inverse()?, &psi_conj.inverse()?)?;
            let scale = direct.iter().map(|z| z.norm()).fold(1.0, f64::max);
            let diff = direct
                .iter()
                .zip(&split)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if diff > 1e-10 * scale {
                return Err(Error::CrossCheck(format!(
                    "the two constructions of |M> differ by {diff:.3e}"
                )));
            }
            direct
        }
    };
    let norm = vec_norm(&amplitudes);
    Ok(MeasurementVector { amplitudes, norm })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationResult {
    /// Normalized state left on `(A, B')`.
    pub output_state: MultipartiteOperator,
    /// Physical success probability with a normalized projector.
    pub probability: f64,
    pub fidelity_with_target: f64,
    pub kind: MeasurementKind,
    /// `Tr(1 (x) |v><v| |phi><phi|^{(x)2})` in the bookkeeping normalization.
    pub bookkeeping_probability: f64,
    /// `1 / (d^2 * bookkeeping_probability)`; a ratio, may exceed 1.
    pub bookkeeping_ratio: f64,
}

fn two_copy_shape(d: usize) -> Result<SubsystemShape> {
    SubsystemShape::new(vec![d; 4])
}

fn embedded_on_measured_slots(k: &ComplexMatrix, d: usize) -> Result<MultipartiteOperator> {
    MultipartiteOperator::new(k.clone(), SubsystemShape::new(vec![d, d])?)?.embed(&MEASURED_SLOTS, &two_copy_shape(d)?)
}

fn target_state(psi: &ComplexMatrix, kind: MeasurementKind) -> Result<Vec<Complex64>> {
    Ok(match kind {
        MeasurementKind::Restore => schmidt_state(psi)?.amplitudes().to_vec(),
        MeasurementKind::Concentrate => bell(Bell::PsiPlus, psi.dim())?.amplitudes().to_vec(),
    })
}

pub fn concentrate(psi: &ComplexMatrix, kind: MeasurementKind) -> Result<ConcentrationResult> {
    let d = psi.dim();
    let phi = schmidt_state(psi)?;
    let two_copies = vec_kron(phi.amplitudes(), phi.amplitudes());
    let v = measurement_vector(psi, kind)?;

    let normalized: Vec<Complex64> = v.amplitudes.iter().map(|z| z / v.norm).collect();
    let projector = embedded_on_measured_slots(&ComplexMatrix::projector(&normalized), d)?;
    let post = projector.matrix().matvec(&two_copies)?;
    let probability = vec_norm(&post).powi(2);
    if probability < MIN_PROBABILITY {
        return Err(Error::ZeroProbability(probability));
    }
    let post_state = MultipartiteOperator::new(ComplexMatrix::projector(&post), two_copy_shape(d)?)?;
    let output_state = post_state.partial_trace(&MEASURED_SLOTS)?.scale_real(1.0 / probability);

    let target = target_state(psi, kind)?;
    let fidelity_with_target = output_state.matrix().quadratic_form(&target)?.re;

    // with |phi> scaled by 1/sqrt d and |v> unnormalized
    let bookkeeping_probability = probability * v.norm * v.norm / (d * d) as f64;
    Ok(ConcentrationResult {
        output_state,
        probability,
        fidelity_with_target,
        kind,
        bookkeeping_probability,
        bookkeeping_ratio: 1.0 / ((d * d) as f64 * bookkeeping_probability),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityConsistency {
    /// Trace of the unnormalized reduced operator, i.e. the bookkeeping
    /// probability.
    pub lhs: f64,
    /// `Tr(target) / d^2` in the bookkeeping normalization.
    pub rhs: f64,
    pub delta: f64,
    /// Largest entrywise deviation of the reduced operator from
    /// `target / d^2`.
    pub operator_residual: f64,
}

/// Evaluates `Tr_{BA'}(1 (x) |v><v| |phi><phi|^{(x)2})` directly in the
/// bookkeeping normalization and compares it with the target projector over
/// `d^2`.
pub fn probability_consistency(psi: &ComplexMatrix, kind: MeasurementKind) -> Result<ProbabilityConsistency> {
    let d = psi.dim();
    let scale = 1.0 / (d as f64).sqrt();
    let phi: Vec<Complex64> = schmidt_state(psi)?.amplitudes().iter().map(|z| z * scale).collect();
    let two_copies = vec_kron(&phi, &phi);
    let v = measurement_vector(psi, kind)?;
    let k = embedded_on_measured_slots(&ComplexMatrix::projector(&v.amplitudes), d)?;
    let applied = k.matrix().matvec(&two_copies)?;
    let reduced = MultipartiteOperator::new(ComplexMatrix::outer(&applied, &two_copies)?, two_copy_shape(d)?)?
        .partial_trace(&MEASURED_SLOTS)?;

    let target: Vec<Complex64> = match kind {
        MeasurementKind::Restore => phi,
        MeasurementKind::Concentrate => bell(Bell::PsiPlus, d)?.amplitudes().to_vec(),
    };
    let expected = ComplexMatrix::projector(&target).scale_real(1.0 / (d * d) as f64);
    let lhs = reduced.matrix().trace().re;
    let rhs = expected.trace().re;
    Ok(ProbabilityConsistency {
        lhs,
        rhs,
        delta: (lhs - rhs).abs(),
        operator_residual: reduced.matrix().max_abs_diff(&expected),
    })
}

/// Ratio of largest to smallest singular value.
pub fn condition_number(m: &ComplexMatrix) -> Result<f64> {
    let vals = m.adjoint().matmul(m)?.eigenvalues()?;
    let (lo, hi) = (vals[0].max(0.0), vals[vals.len() - 1]);
    if lo == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((hi / lo).sqrt())
}

/// Complex Gaussian `d x d` matrix scaled to `Tr(Psi^dagger Psi) = 1`,
/// redrawn while its condition number exceeds `1e3`.
pub fn random_schmidt_operator<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<ComplexMatrix> {
    loop {
        let entries: Vec<Complex64> = (0..d * d)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let m = ComplexMatrix::from_entries(entries)?;
        let norm = m.frobenius_norm();
        if norm < 1e-12 {
            continue;
        }
        let m = m.scale_real(1.0 / norm);
        if condition_number(&m)? <= MAX_SAMPLE_CONDITION {
            return Ok(m);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationSample {
    pub index: usize,
    pub result: ConcentrationResult,
    pub consistency: ProbabilityConsistency,
}

/// Runs the protocol on `samples` seeded random `Psi`.
pub fn sample_concentration(
    d: usize,
    kind: MeasurementKind,
    samples: usize,
    seed: u64,
) -> Result<Vec<ConcentrationSample>> {
    let mut rng = stream_rng(seed, 0);
    (0..samples)
        .map(|index| {
            let psi = random_schmidt_operator(&mut rng, d)?;
            Ok(ConcentrationSample {
                index,
                result: concentrate(&psi, kind)?,
                consistency: probability_consistency(&psi, kind)?,
            })
        })
        .collect()
}

/// Fidelity `<t|rho|t>` of a state with a pure target.
pub fn fidelity(rho: &ComplexMatrix, target: &[Complex64]) -> Result<f64> {
    let n = vec_norm(target);
    Ok(rho.quadratic_form(target)?.re / (n * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;

    fn maximal(d: usize) -> ComplexMatrix {
        ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt())
    }

    #[test]
    fn restore_vector_for_maximal_psi() {
        let d = 3;
        let v = measurement_vector(&maximal(d), MeasurementKind::Restore).unwrap();
        let bell = bell(Bell::PsiPlus, d).unwrap();
        for (a, b) in v.amplitudes.iter().zip(bell.amplitudes()) {
            assert!((a - b * (d as f64).sqrt()).norm() < 1e-14);
        }
    }

    #[test]
    fn restore_vector_for_diagonal_psi() {
        let (p, q) = (0.9f64.sqrt(), 0.1f64.sqrt());
        let psi = ComplexMatrix::from_diagonal(&[c(p, 0.0), c(q, 0.0)]);
        let v = measurement_vector(&psi, MeasurementKind::Restore).unwrap();
        let s = 0.5f64.sqrt();
        let expected = [c(s / p, 0.0), ZERO, ZERO, c(s / q, 0.0)];
        for (a, b) in v.amplitudes.iter().zip(expected) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn maximal_psi_is_a_fixed_point() {
        for kind in [MeasurementKind::Restore, MeasurementKind::Concentrate] {
            let r = concentrate(&maximal(2), kind).unwrap();
            assert!((r.fidelity_with_target - 1.0).abs() < 1e-12);
            let target = bell(Bell::PsiPlus, 2).unwrap().density();
            assert!(r.output_state.matrix().max_abs_diff(target.matrix()) < 1e-12);
            let pc = probability_consistency(&maximal(2), kind).unwrap();
            assert!(pc.delta <= 1e-12);
        }
    }

    #[test]
    fn singular_psi_is_rejected() {
        let psi = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), ZERO]);
        assert!(concentrate(&psi, MeasurementKind::Restore).is_err());
        assert!(measurement_vector(&psi, MeasurementKind::Concentrate).is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("M".parse::<MeasurementKind>().unwrap(), MeasurementKind::Concentrate);
        assert!("x".parse::<MeasurementKind>().is_err());
    }

    #[test]
    fn sampled_operators_are_normalized_and_conditioned() {
        let mut rng = stream_rng(5, 0);
        for d in 2..=4 {
            let psi = random_schmidt_operator(&mut rng, d).unwrap();
            assert!((psi.frobenius_norm() - 1.0).abs() < 1e-12);
            assert!(condition_number(&psi).unwrap() <= 1e3);
        }
    }
}
