use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch ({left} vs {right})")]
    DimensionMismatch {
        op: &'static str,
        left: usize,
        right: usize,
    },

    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("matrix is singular or ill-conditioned (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("operator dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid subsystem shape: {0}")]
    InvalidShape(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("slot {slot} is out of range for {slots} slots")]
    SlotOutOfRange { slot: usize, slots: usize },

    #[error("slot {0} is used more than once")]
    SlotCollision(usize),

    #[error("slot {slot}: local dimension {local} does not match {full}")]
    SlotDimMismatch { slot: usize, local: usize, full: usize },

    #[error("partial trace over every slot; use trace instead")]
    TraceAllSlots,

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not a valid state: {0}")]
    InvalidState(String),

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo:.3e}, f(hi) = {f_hi:.3e})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("expectation has imaginary residue {0:.3e}")]
    ImaginaryResidue(f64),

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("measurement outcome has probability {0:.3e}")]
    ZeroProbability(f64),

    #[error("invalid slot label `{label}`: {reason}")]
    SlotLabel { label: String, reason: &'static str },

    #[error("scenario: {0}")]
    Scenario(String),

    #[error("scenario parse error at line {line}, column {column}: {message}")]
    ScenarioParse {
        line: usize,
        column: usize,
        message: String,
    },
}
