use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max |A - A^H| = {max_asymmetry:.3e}, max |A| = {scale:.3e})")]
    NonHermitian { max_asymmetry: f64, scale: f64 },

    #[error("invalid factor index {index} (state has {factors} factors)")]
    InvalidFactor { index: usize, factors: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("operators do not commute on the interior subspace (residual {residual:.3e}, bound {bound:.3e})")]
    NonCommuting { residual: f64, bound: f64 },

    #[error("no spin factor conserves J_w: residual(s=1) = {residual_one:.3e}, residual(s=1/2) = {residual_half:.3e}")]
    SpinFactor { residual_one: f64, residual_half: f64 },

    #[error("ground levels split by {gap:.3e} (tolerance {tolerance:.1e}); increase the truncation")]
    GroundSplit { gap: f64, tolerance: f64 },

    #[error("angular-qubit weight {weight:.4} is below 0.5; m-spectrum {spectrum:?}")]
    AngularWeight { weight: f64, spectrum: Vec<(i32, f64)> },

    #[error("kappa = {kappa} is below the large-coupling threshold {threshold}")]
    BelowThreshold { kappa: f64, threshold: f64 },

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
