use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-invertible: {0}")]
    NonInvertible(&'static str),

    #[error("argument of the zero quaternion is undefined")]
    ZeroArgument,

    #[error("singular matrix (det = {det:e})")]
    Singular { det: f64 },

    #[error("not SL-normalized (det = {det}, tolerance {tol:e})")]
    NotSlNormalized { det: f64, tol: f64 },

    #[error(
        "ambiguous classification: abt - 2 = {abt_margin:e}, \
         modulus deviations from 1 = ({lambda_margin:e}, {mu_margin:e})"
    )]
    AmbiguousClassification {
        abt_margin: f64,
        lambda_margin: f64,
        mu_margin: f64,
    },

    #[error("no isolated fixed points (matrix is within tolerance of +/-I)")]
    NoIsolatedFixedPoints,

    #[error("eigen-decomposition failed: {0}")]
    Eigen(&'static str),

    #[error("identity violated: residual {residual:e} exceeds bound {bound:e}")]
    IdentityViolated { residual: f64, bound: f64 },

    #[error("sequence diverged: monitored {at_half:e} at n = {half}, {at_full:e} at n = {full}")]
    SequenceDiverged {
        half: usize,
        full: usize,
        at_half: f64,
        at_full: f64,
    },

    #[error("limit certificate not violated: lhs {lhs} against threshold {threshold}")]
    LimitNotViolated { lhs: f64, threshold: f64 },

    #[error("test map is not admissible for mode {mode}: {reason}")]
    InadmissibleTestMap { mode: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
