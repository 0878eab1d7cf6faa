use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix entries contain NaN or infinity")]
    NonFinite,

    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    BadShape {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace {trace} differs from 1")]
    NotUnitTrace { trace: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("input contains a {photons}-photon term above the truncation limit {n_max}")]
    TruncationOverflow { photons: u32, n_max: u32 },

    #[error("no amplitude survives post-selection of one photon per output port")]
    EmptyPostselection,

    #[error("state is not Bell-diagonal (residual {residual:e})")]
    NotBellDiagonal { residual: f64 },

    #[error("measured discord {0:e} is negative beyond numerical tolerance")]
    NegativeDiscord(f64),

    #[error("tomography records are not informationally complete: {0}")]
    NotInformationallyComplete(String),

    #[error("maximum-likelihood reconstruction did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
