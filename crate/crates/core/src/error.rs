use thiserror::Error;

/// Everything that can go wrong in the compute modules and the file formats.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("interval bounds out of order: lo {lo} > hi {hi}")]
    InvalidBounds { lo: f64, hi: f64 },

    #[error("interval bound is not finite")]
    NonFinite,

    #[error("negative scalar {0}: intervals may only be scaled by a nonnegative real")]
    NegativeScalar(f64),

    #[error("interval subtraction undefined: |x| = {lhs_width} < |y| = {rhs_width}")]
    WidthViolation { lhs_width: f64, rhs_width: f64 },

    #[error("operand has a negative lower bound ({0})")]
    NegativeOperand(f64),

    #[error("interval division by an interval with a zero bound")]
    ZeroDenominator,

    #[error("interval division undefined: x.lo*y.hi = {lhs} > x.hi*y.lo = {rhs}")]
    OrderViolation { lhs: f64, rhs: f64 },

    #[error("{n} agents exceeds the limit of {limit} for exhaustive operations")]
    TooManyAgents { n: usize, limit: usize },

    #[error("agent set must be nonempty")]
    EmptyAgentSet,

    #[error("duplicate agent label or id `{0}`")]
    DuplicateId(String),

    #[error("table length {got} does not match 2^{n} = {expected}")]
    TableSize { n: usize, got: usize, expected: usize },

    #[error("characteristic function must vanish on the empty coalition (got {0})")]
    NonzeroEmptyCoalition(f64),

    #[error("allocation has {got} shares for {expected} agents")]
    AllocationSize { got: usize, expected: usize },

    #[error("ordering cost must be positive (got {0})")]
    NonPositiveOrderingCost(f64),

    #[error("holding cost must be positive (got {0})")]
    NonPositiveHoldingCost(f64),

    #[error("every order frequency is [0,0]; the aggregate ratio is 0/0")]
    AllZeroFrequencies,

    #[error("condition for the interval SOC-rule fails: {0}")]
    SocConditionViolated(String),

    #[error("length game is not monotone: adding agent {agent} to coalition {coalition:#b} shrinks the interval width")]
    NotSizeMonotonic { coalition: u32, agent: usize },

    #[error("combined situation is not admissible for the rule: {0}")]
    CombinedSituationInvalid(String),

    #[error("situations are not comparable: {0}")]
    IncompatibleSituations(String),

    #[error("every agent is inactive (m = [0,0])")]
    AllAgentsInactive,

    #[error("balanced contributions needs at least two agents")]
    NotEnoughAgents,

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("bounds error for agent `{agent}`: {field}_lo {lo} > {field}_hi {hi}")]
    Bounds {
        agent: String,
        field: &'static str,
        lo: f64,
        hi: f64,
    },
}

impl Error {
    pub(crate) fn too_many(n: usize, limit: usize) -> Self {
        Error::TooManyAgents { n, limit }
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors raised while reading input files, as opposed to model
    /// preconditions.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::Schema { .. } | Error::Bounds { .. } | Error::DuplicateId(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
