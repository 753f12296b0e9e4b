use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid plant: {0}")]
    InvalidPlant(String),

    #[error("time constant {time_constant} coincides with zero constant {zero_constant}; common factors are not cancelled")]
    CommonFactor { time_constant: f64, zero_constant: f64 },

    #[error("plant zero on the imaginary axis at y = {0}")]
    ZeroOnImaginaryAxis(f64),

    #[error("no principal term: m = {m} zeros with n = {n} poles requires m <= n - 1")]
    OrderViolation { n: usize, m: usize },

    #[error("no real branch of the tangent-matching function at y = {0}")]
    NoRealBranch(f64),

    #[error("tangent-matching function does not exist at y = 0: sum of t_i^2 must exceed sum of z_i^2")]
    ExistenceFail,

    #[error("slope at zero is not real (negative radicand {0})")]
    ImaginarySlope(f64),

    #[error("Sturm chain terminated early at degree {degree}: multiple root suspected")]
    MultipleRootSuspected { degree: usize },

    #[error("polynomial vanishes at the interval endpoint x = 0")]
    EndpointIsRoot,

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("admissible interval for h is empty: {0}")]
    EmptyInterval(String),

    #[error("h = {h} is not strictly inside the admissible interval ({lower}, {upper})")]
    HOutsideInterval { h: f64, lower: f64, upper: f64 },

    #[error("characteristic function vanishes on the contour after {attempts} perturbations")]
    ContourHitsZero { attempts: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
