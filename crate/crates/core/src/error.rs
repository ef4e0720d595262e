use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty sample list")]
    EmptySamples,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("1 + g is not positive (min {min:.3e}); reciprocal undefined")]
    NotInvertible { min: f64 },

    #[error("diffeomorphism loses orientation: min derivative {min_derivative:.3e}")]
    Orientation { min_derivative: f64 },

    #[error("Newton inversion did not converge at θ = {theta} (residual {residual:.3e})")]
    NewtonDiverged { theta: f64, residual: f64 },

    #[error("flow integration needs {steps} steps, exceeds the step budget")]
    StepUnderflow { steps: u64 },

    #[error("mollifier width {width} too large: derivative positivity lost")]
    WidthTooLarge { width: f64 },

    #[error("outside the validated neighbourhood: {what} = {value:.3e} exceeds ε = {epsilon:.3e}")]
    Neighbourhood { what: &'static str, value: f64, epsilon: f64 },

    #[error("cover too tight: constructed derivative {min_derivative:.3e} in interval {interval}")]
    CoverTooTight { interval: usize, min_derivative: f64 },

    #[error("support violation: deviation {deviation:.3e} outside interval {interval}")]
    Support { interval: usize, deviation: f64 },

    #[error("Gram matrix at level {level} has negative eigenvalue {eigenvalue:.3e}; not unitary")]
    NonUnitary { level: usize, eigenvalue: f64 },

    #[error("mode {mode} outside truncation level {level_cap}")]
    ModeOutOfRange { mode: i64, level_cap: usize },

    #[error("field cutoff {cutoff} exceeds truncation level {level_cap}")]
    CutoffOverflow { cutoff: usize, level_cap: usize },

    #[error("exactness window is empty: level cap {level_cap} < {needed}")]
    EmptyWindow { level_cap: usize, needed: usize },

    #[error("probe level {probe_level} + field degree {degree} exceeds level cap {level_cap}")]
    ProbeTooHigh { probe_level: usize, degree: usize, level_cap: usize },

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("zero field")]
    ZeroField,

    #[error("phase alignment undefined: tr(V†U) = 0 (distance {distance})")]
    AlignmentUndefined { distance: f64 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("central charges differ: {0} vs {1}")]
    CentralChargeMismatch(f64, f64),

    #[error("lowest weights {0} and {1} are not integer spaced (h_j - h_j' must be an integer)")]
    NonIntegerSpacing(f64, f64),

    #[error("discrete series index out of range: {0}")]
    SeriesDomain(String),

    #[error("level {level} exceeds oracle maximum {max}")]
    DegreeOverflow { level: usize, max: usize },

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
