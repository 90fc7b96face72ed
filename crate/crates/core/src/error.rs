use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation mismatch: {left} vs {right} (resample explicitly)")]
    TruncationMismatch { left: usize, right: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate background direction: smallest Gram eigenvalue {lambda_min:.3e}")]
    DegenerateDirection { lambda_min: f64 },

    #[error("horizontal wavevector is zero")]
    ZeroMode,

    #[error(
        "constraint violated: taylor residual {taylor:.3e}, divergence residual {divergence:.3e}"
    )]
    ConstraintViolated { taylor: f64, divergence: f64 },

    #[error("e_{k} not resolved: tail norm {tail:.3e}")]
    ResolutionExceeded { k: i64, tail: f64 },

    #[error("band N = {band} needs eigenfunctions up to |k| = {band}, basis stores {available}")]
    BandExceedsBasis { band: usize, available: usize },

    #[error("resonance ({i}, {j}) has right-hand side {residual:.3e}")]
    ResonanceViolation { i: i64, j: i64, residual: f64 },

    #[error("eps * |Q| = {value:.3e} is not below 1/2")]
    RegimeViolation { value: f64 },

    #[error("matrix exponential failed its accuracy check: {0}")]
    IllConditioned(String),

    #[error(
        "constraint drift: taylor residual {taylor:.3e}, divergence residual {divergence:.3e}"
    )]
    ConstraintDrift { taylor: f64, divergence: f64 },

    #[error("eigen-solver did not converge: {0}")]
    EigenFailure(String),
}
