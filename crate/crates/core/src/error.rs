use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("step {step}: expected {expected} values, got {got}")]
    DimensionMismatch { step: usize, expected: usize, got: usize },

    #[error("step {step}: proportion p[{step},{index}] = {value} is outside [0, 1]")]
    ProportionOutOfRange { step: usize, index: usize, value: f64 },

    #[error(
        "step {step}: boundary point a[{step},{index}] = {value} breaks monotonicity \
         (previous end point {previous})"
    )]
    BoundaryNotMonotone {
        step: usize,
        index: usize,
        value: f64,
        previous: f64,
    },

    #[error("step {step}: boundary point a[{step},{index}] is not finite")]
    BoundaryOverflow { step: usize, index: usize },

    #[error("step {step}: degenerate interval of length {length}")]
    DegenerateInterval { step: usize, length: f64 },

    #[error("boundary table covers steps 0..={last}, step {step} requested")]
    TableExhausted { step: usize, last: usize },

    #[error("proportion table covers steps 1..={last}, step {step} requested")]
    ProportionsExhausted { step: usize, last: usize },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("a seed is required for a random boundary or split")]
    MissingSeed,

    #[error("the boundary has no known growth regime")]
    UnknownRegime,

    #[error("empty sample")]
    EmptySample,

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("sample contains a non-finite value")]
    NonFiniteSample,

    #[error("invalid window state: {0}")]
    InvalidWindow(String),

    #[error("invalid line configuration: {0}")]
    InvalidConfig(String),

    #[error("chain state ({b}, {t}) is not in (0, inf)^2")]
    NonPositiveState { b: f64, t: f64 },

    #[error(
        "test function support [{lo}, {hi}] not covered by the boundary in {failures} of \
         {replications} replications"
    )]
    SupportNotCovered {
        lo: f64,
        hi: f64,
        failures: usize,
        replications: usize,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter { name, value, reason }
    }
}
