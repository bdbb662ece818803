use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare {
        row: usize,
        len: usize,
        expected: usize,
    },

    #[error("dimension {n} is too small, need at least 2")]
    TooSmall { n: usize },

    #[error("dimension {n} exceeds the supported maximum of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("entry ({row}, {col}) = {value} is not strictly positive")]
    NonPositiveEntry { row: usize, col: usize, value: f64 },

    #[error("entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("coordinates sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("coordinate sum has modulus {modulus}, normalization undefined")]
    ZeroSum { modulus: f64 },

    #[error("invalid sampling range [{lo}, {hi}]")]
    BadRange { lo: f64, hi: f64 },

    #[error("epsilon {eps} outside the admissible range")]
    BadEpsilon { eps: f64 },

    #[error("tolerance {tol} must be positive and finite")]
    BadTolerance { tol: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("vector is not in the cone of positive-real-part ratios")]
    NotInCone,

    #[error("all sampled pairs were projectively degenerate")]
    DegenerateSample,

    #[error("QR iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("Perron root is not isolated: |{first}| vs |{second}|")]
    PerronAmbiguous { first: f64, second: f64 },

    #[error("Perron root has imaginary part {imag} relative to modulus {modulus}")]
    PerronNotReal { imag: f64, modulus: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
