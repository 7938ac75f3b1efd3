use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix of dimension {dim} needs {expected} entries, got {actual}")]
    EntryCount {
        dim: usize,
        expected: usize,
        actual: usize,
    },

    #[error("ket is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("not a valid density matrix: {reason}")]
    InvalidDensityMatrix { reason: String },

    #[error("parameter `{name}` = {value} is outside its valid range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("probability {value} leaves [0, 1] beyond rounding tolerance ({context})")]
    ProbabilityOutOfRange { value: f64, context: &'static str },

    #[error("trace has imaginary part {imag} ({context})")]
    ComplexTrace { imag: f64, context: &'static str },

    #[error("optical element addresses path {path}, but only paths 0..4 exist")]
    InvalidPath { path: usize },

    #[error("azimuthal phase {phi} cannot be represented by real wave-plate amplitudes")]
    UnsupportedPhase { phi: f64 },

    #[error("grid needs at least 2 points per axis, got {0}")]
    GridTooSmall(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
