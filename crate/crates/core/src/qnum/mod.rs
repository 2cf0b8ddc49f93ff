//! Complex linear algebra substrate: states, gates, tensor products,
//! controlled gates, projective measurement, Householder reflections.
//!
//! Conventions used throughout the crate:
//!
//! - Basis states are ordered lexicographically; wire 0 is the leftmost ket
//!   symbol, i.e. the highest-order bit of a basis index.
//! - Two operators/states are "equal up to global phase" when
//!   `min_phi ||A - e^{i phi} B||_F <= tol`, with the optimal phase computed
//!   from `arg(Tr(A^dag B))`.

mod gates;
mod householder;
mod matrix;
mod state;
mod textfmt;

pub use gates::{gate_matrix, ms_gate, ms_generator_phases, GateName};
pub use householder::{householder_factor, householder_qr, HouseholderDecomp, HouseholderFactor};
pub use matrix::{controlled, UMatrix};
pub use state::{measure, MeasureOutcome, StateVector};
pub use textfmt::{format_complex, parse_complex_token};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Control polarity: positive fires on `|1>`, negative on `|0>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    #[serde(rename = "pos")]
    Positive,
    #[serde(rename = "neg")]
    Negative,
}

impl Polarity {
    pub fn fires_on(self) -> bool {
        matches!(self, Polarity::Positive)
    }
}

/// Complex scalar. Double-precision pair, finite after every public operation.
pub type Amplitude = Complex64;

/// Norm / unitarity tolerance.
pub const NORM_TOL: f64 = 1e-9;
/// Element-wise equality tolerance.
pub const EQ_TOL: f64 = 1e-10;
/// Probabilities below this can never be drawn by a measurement.
pub const PROB_FLOOR: f64 = 1e-12;
/// Default cap on simulated register width; larger requests error out.
pub const DEFAULT_MAX_QUBITS: usize = 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QnumError {
    #[error("unknown gate name `{0}`")]
    UnknownGate(String),
    #[error("gate `{gate}` expects {expected} parameter(s), got {got}")]
    WrongParamCount {
        gate: String,
        expected: usize,
        got: usize,
    },
    #[error("register of {requested} qubits exceeds the configured maximum of {max}")]
    WidthOverflow { requested: usize, max: usize },
    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("state vector is not normalized (|norm^2 - 1| = {deviation:.3e})")]
    NotNormalized { deviation: f64 },
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("duplicate target wire {0}")]
    DuplicateTarget(usize),
    #[error("target wire {wire} out of range for {n_qubits} qubits")]
    TargetOutOfRange { wire: usize, n_qubits: usize },
    #[error("operator dimension {dim} does not match {targets} target wire(s)")]
    DimensionMismatch { dim: usize, targets: usize },
    #[error("Householder column has an (almost) zero active suffix")]
    ZeroSuffix,
    #[error("matrix parse error at line {line}: {msg}")]
    MatrixParse { line: usize, msg: String },
}

/// `true` when `|a - b|` is within `tol` component-wise in modulus.
pub fn approx_eq_c(a: Amplitude, b: Amplitude, tol: f64) -> bool {
    (a - b).norm() <= tol
}

pub(crate) fn check_finite(amps: &[Amplitude]) -> Result<(), QnumError> {
    for (i, a) in amps.iter().enumerate() {
        if !a.re.is_finite() || !a.im.is_finite() {
            return Err(QnumError::NonFinite(i));
        }
    }
    Ok(())
}

/// log2 of a power-of-two dimension.
pub(crate) fn log2_exact(dim: usize) -> Result<usize, QnumError> {
    if dim == 0 || dim & (dim - 1) != 0 {
        return Err(QnumError::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}
