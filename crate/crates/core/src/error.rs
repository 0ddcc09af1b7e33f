use thiserror::Error;

#[derive(Debug, Error)]
pub enum PrftError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not hermitian: {0}")]
    NonHermitian(String),

    #[error("incommensurate frequencies: {0}")]
    Incommensurate(String),

    #[error("unitarity drift {drift:e} exceeds {tol:e} at t = {t}")]
    UnitarityDrift { drift: f64, tol: f64, t: f64 },

    #[error("degenerate quasienergies: {0}")]
    Degeneracy(String),

    #[error("branch ambiguity in log of generating function: {0}")]
    BranchCut(String),

    #[error("aliasing: {0}")]
    Aliasing(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("fock window too small: {0}")]
    WindowTooSmall(String),

    #[error("truncation leakage {weight:e} at {edge} edge")]
    Leakage { edge: String, weight: f64 },

    #[error("numerical instability: {0}")]
    Unstable(String),
}

pub type Result<T> = std::result::Result<T, PrftError>;
