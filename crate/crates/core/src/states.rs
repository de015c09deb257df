//! Fixed states and one-parameter state families.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, vec_norm, ComplexMatrix, ONE, ZERO};
use crate::multipartite::{MultipartiteOperator, SubsystemShape};

const NORM_TOL: f64 = 1e-12;

/// A normalized state vector over a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    shape: SubsystemShape,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>, shape: SubsystemShape) -> Result<Self> {
        if amplitudes.len() != shape.total_dim() {
            return Err(Error::DimensionMismatch {
                op: "pure state",
                left: amplitudes.len(),
                right: shape.total_dim(),
            });
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm}")));
        }
        Ok(Self { amplitudes, shape })
    }

    /// Normalizes `amplitudes` before constructing.
    pub fn normalized(amplitudes: Vec<Complex64>, shape: SubsystemShape) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(amplitudes.iter().map(|z| z / norm).collect(), shape)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    pub fn density(&self) -> MultipartiteOperator {
        MultipartiteOperator::new(ComplexMatrix::projector(&self.amplitudes), self.shape.clone())
            .expect("shape matches")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bell {
    /// `(|00> + |11>)/sqrt 2`, or `(1/sqrt d) sum |ii>` in dimension `d`.
    PsiPlus,
    /// `(|00> - |11>)/sqrt 2`.
    PsiMinus,
    /// `(|01> + |10>)/sqrt 2`.
    PhiPlus,
}

pub fn bell(which: Bell, d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::Unsupported(format!("Bell state in dimension {d}")));
    }
    if which != Bell::PsiPlus && d != 2 {
        return Err(Error::Unsupported(format!("{which:?} only exists for d = 2")));
    }
    let shape = SubsystemShape::new(vec![d, d])?;
    let mut amps = vec![ZERO; d * d];
    match which {
        Bell::PsiPlus => {
            let a = c(1.0 / (d as f64).sqrt(), 0.0);
            for i in 0..d {
                amps[i * d + i] = a;
            }
        }
        Bell::PsiMinus => {
            let s = 0.5f64.sqrt();
            amps[0] = c(s, 0.0);
            amps[3] = c(-s, 0.0);
        }
        Bell::PhiPlus => {
            let s = 0.5f64.sqrt();
            amps[1] = c(s, 0.0);
            amps[2] = c(s, 0.0);
        }
    }
    PureState::new(amps, shape)
}

pub fn ghz() -> PureState {
    let s = 0.5f64.sqrt();
    let mut amps = vec![ZERO; 8];
    amps[0] = c(s, 0.0);
    amps[7] = c(s, 0.0);
    PureState::new(amps, SubsystemShape::qubits(3)).unwrap()
}

/// `(|001> + |010> + |100>)/sqrt 3`.
pub fn w_state() -> PureState {
    let a = c(1.0 / 3f64.sqrt(), 0.0);
    let mut amps = vec![ZERO; 8];
    for idx in [1, 2, 4] {
        amps[idx] = a;
    }
    PureState::new(amps, SubsystemShape::qubits(3)).unwrap()
}

/// Two-qubit state with an imaginary coherence between `|01>` and `|10>`;
/// invisible to every real-valued witness.
pub fn sigma_imaginarity() -> MultipartiteOperator {
    let h = c(0.5, 0.0);
    let ih = c(0.0, 0.5);
    let m = ComplexMatrix::from_entries(vec![
        ZERO, ZERO, ZERO, ZERO, //
        ZERO, h, ih, ZERO, //
        ZERO, -ih, h, ZERO, //
        ZERO, ZERO, ZERO, ZERO,
    ])
    .unwrap();
    MultipartiteOperator::qubits(m).unwrap()
}

fn mix_with_identity(pure: &PureState, weight_pure: f64) -> MultipartiteOperator {
    let dim = pure.shape().total_dim();
    let rho = pure.density();
    let m = rho
        .matrix()
        .scale_real(weight_pure)
        .add(&ComplexMatrix::identity(dim).scale_real((1.0 - weight_pure) / dim as f64))
        .unwrap();
    MultipartiteOperator::new(m, pure.shape().clone()).unwrap()
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ParameterOutOfRange {
            name,
            value,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// `w 1/4 + (1 - w)|psi+><psi+|`.
pub fn werner_w(w: f64) -> Result<MultipartiteOperator> {
    check_unit_interval("w", w)?;
    Ok(mix_with_identity(&bell(Bell::PsiPlus, 2)?, 1.0 - w))
}

/// `a |psi-><psi-| + (1 - a) 1/4`.
pub fn werner_a(a: f64) -> Result<MultipartiteOperator> {
    check_unit_interval("a", a)?;
    Ok(mix_with_identity(&bell(Bell::PsiMinus, 2)?, a))
}

/// `(1 - c)|W><W| + c 1/8`.
pub fn noisy_w(c: f64) -> Result<MultipartiteOperator> {
    check_unit_interval("c", c)?;
    Ok(mix_with_identity(&w_state(), 1.0 - c))
}

/// The bipartite pure state `(1 (x) Psi) sum_i |ii>`, normalized so that
/// `Tr(Psi^dagger Psi) = 1` gives a unit vector.
pub fn schmidt_state(psi: &ComplexMatrix) -> Result<PureState> {
    let d = psi.dim();
    check_schmidt_operator(psi)?;
    let mut amps = vec![ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            // (1 (x) Psi)|ii> contributes Psi[j][i] to |i j>
            amps[i * d + j] = psi[(j, i)];
        }
    }
    PureState::new(amps, SubsystemShape::new(vec![d, d])?)
}

/// The same state built as `(Psi^T (x) 1) sum_i |ii>`.
pub fn schmidt_state_transposed(psi: &ComplexMatrix) -> Result<PureState> {
    let d = psi.dim();
    check_schmidt_operator(psi)?;
    let pt = psi.transpose();
    let mut amps = vec![ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            amps[j * d + i] = pt[(j, i)];
        }
    }
    PureState::new(amps, SubsystemShape::new(vec![d, d])?)
}

pub(crate) fn check_schmidt_operator(psi: &ComplexMatrix) -> Result<()> {
    let norm = psi.trace_product(&psi.adjoint()).map(|z| z.re)?;
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("Tr(Psi^dagger Psi) = {norm}")));
    }
    psi.inverse()?;
    Ok(())
}

/// Named one-parameter families of density matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateFamily {
    WernerW,
    WernerA,
    NoisyW,
}

impl StateFamily {
    pub const ALL: [StateFamily; 3] = [Self::WernerW, Self::WernerA, Self::NoisyW];

    pub fn name(self) -> &'static str {
        match self {
            Self::WernerW => "werner_w",
            Self::WernerA => "werner_a",
            Self::NoisyW => "noisy_w",
        }
    }

    pub fn param_name(self) -> &'static str {
        match self {
            Self::WernerW => "w",
            Self::WernerA => "a",
            Self::NoisyW => "c",
        }
    }

    pub fn param_range(self) -> (f64, f64) {
        (0.0, 1.0)
    }

    pub fn shape(self) -> SubsystemShape {
        match self {
            Self::WernerW | Self::WernerA => SubsystemShape::qubits(2),
            Self::NoisyW => SubsystemShape::qubits(3),
        }
    }

    pub fn n_parties(self) -> usize {
        self.shape().len()
    }

    pub fn state(self, param: f64) -> Result<MultipartiteOperator> {
        match self {
            Self::WernerW => werner_w(param),
            Self::WernerA => werner_a(param),
            Self::NoisyW => noisy_w(param),
        }
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|fam| fam.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "state family",
                name: s.to_string(),
            })
    }
}

/// Parameter-free states addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FixedState {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    Sigma,
    Ghz,
    W,
}

impl FixedState {
    pub const ALL: [FixedState; 6] = [
        Self::PsiPlus,
        Self::PsiMinus,
        Self::PhiPlus,
        Self::Sigma,
        Self::Ghz,
        Self::W,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::PsiPlus => "psi_plus",
            Self::PsiMinus => "psi_minus",
            Self::PhiPlus => "phi_plus",
            Self::Sigma => "sigma",
            Self::Ghz => "ghz",
            Self::W => "w_state",
        }
    }

    pub fn state(self) -> MultipartiteOperator {
        match self {
            Self::PsiPlus => bell(Bell::PsiPlus, 2).unwrap().density(),
            Self::PsiMinus => bell(Bell::PsiMinus, 2).unwrap().density(),
            Self::PhiPlus => bell(Bell::PhiPlus, 2).unwrap().density(),
            Self::Sigma => sigma_imaginarity(),
            Self::Ghz => ghz().density(),
            Self::W => w_state().density(),
        }
    }
}

impl FromStr for FixedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "state",
                name: s.to_string(),
            })
    }
}

/// Product of single-party pure states.
pub fn product_state(locals: &[Vec<Complex64>]) -> Vec<Complex64> {
    locals.iter().fold(vec![ONE], |acc, v| crate::linalg::vec_kron(&acc, v))
}
