use thiserror::Error;

/// Errors raised across the library. Every variant maps to a stable
/// machine-readable code via [`Error::code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision violation: {0}")]
    PrecisionViolation(String),
    #[error("variable lists differ: {0}")]
    VariableMismatch(String),
    #[error("series vanishes below its truncation {0}")]
    ZeroUpToTruncation(u32),
    #[error("not a unit: constant term is zero")]
    NotAUnit,
    #[error("constant term must be 1")]
    ConstantTermNotOne,
    #[error("not divisible: offending monomial {0}")]
    NotDivisible(String),
    #[error("substitution image has order 0: {0}")]
    OrderTooLow(String),
    #[error("series is not regular in {0}")]
    NotRegular(String),
    #[error("order unknown below truncation {0}")]
    OrderUnknown(u32),
    #[error("invalid ODE system: {0}")]
    InvalidOdeSystem(String),
    #[error("membership decomposition failed: {0}")]
    DecompositionFailed(String),
    #[error("difference is not in m^{0}")]
    NotWithinDeterminacyBall(u32),
    #[error("determinacy could not be certified: {0}")]
    NotCertified(String),
    #[error("division failed at coefficient equation ({equation}): {detail}")]
    DivisionFailed { equation: usize, detail: String },
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    #[error("side condition violated: {0}")]
    SideConditionViolated(String),
    #[error("not an obstruction case: {0}")]
    NotAnObstructionCase(String),
    #[error("order {0} outside the supported range")]
    OrderOutOfRange(String),
    #[error("parse error at byte {offset}: expected one of {expected:?}")]
    Parse { offset: usize, expected: Vec<String> },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::PrecisionViolation(_) => "precision_violation",
            Error::VariableMismatch(_) => "variable_mismatch",
            Error::ZeroUpToTruncation(_) => "zero_up_to_truncation",
            Error::NotAUnit => "not_a_unit",
            Error::ConstantTermNotOne => "constant_term_not_one",
            Error::NotDivisible(_) => "not_divisible",
            Error::OrderTooLow(_) => "order_too_low",
            Error::NotRegular(_) => "not_regular",
            Error::OrderUnknown(_) => "order_unknown",
            Error::InvalidOdeSystem(_) => "invalid_ode_system",
            Error::DecompositionFailed(_) => "decomposition_failed",
            Error::NotWithinDeterminacyBall(_) => "not_within_determinacy_ball",
            Error::NotCertified(_) => "not_certified",
            Error::DivisionFailed { .. } => "division_failed",
            Error::InconsistentInput(_) => "inconsistent_input",
            Error::SideConditionViolated(_) => "side_condition_violated",
            Error::NotAnObstructionCase(_) => "not_an_obstruction_case",
            Error::OrderOutOfRange(_) => "order_out_of_range",
            Error::Parse { .. } => "parse_error",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }

    pub fn precision(msg: impl Into<String>) -> Self {
        Error::PrecisionViolation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
