use thiserror::Error;

/// Failures of the PSO engine and its inputs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PsoError {
    #[error("beta must lie in [0.01, 1.0], got {0}")]
    BetaOutOfRange(f64),
    #[error("parameter {name} must be finite, got {value}")]
    NonFiniteParameter { name: &'static str, value: f64 },
    #[error("search space must have at least one dimension")]
    EmptySpace,
    #[error("search space bounds have lengths {lower} and {upper}")]
    BoundsLengthMismatch { lower: usize, upper: usize },
    #[error("dimension {dim}: lower bound {lower} is not below upper bound {upper}")]
    DegenerateBounds { dim: usize, lower: f64, upper: f64 },
    #[error("vector length {found} does not match dimension {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("non-finite value encountered in {0}")]
    NumericalFault(&'static str),
}

/// Errors raised while reading an instance file. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header, expected `<jobs> <machines>`")]
    MalformedHeader { line: usize },
    #[error("line {line}, column {column}: `{token}` is not a decimal integer")]
    InvalidToken {
        line: usize,
        column: usize,
        token: String,
    },
    #[error("line {line}: expected {expected} tokens for {machines} machines, found {found}")]
    TokenCount {
        line: usize,
        machines: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: machine index {machine} out of range")]
    MachineOutOfRange {
        line: usize,
        column: usize,
        machine: i64,
    },
    #[error("line {line}, column {column}: machine {machine} appears twice in one job")]
    DuplicateMachine {
        line: usize,
        column: usize,
        machine: i64,
    },
    #[error("line {line}, column {column}: negative duration {duration}")]
    NegativeDuration {
        line: usize,
        column: usize,
        duration: i64,
    },
    #[error("expected {expected} job lines, found {found}")]
    MissingJobs { expected: usize, found: usize },
    #[error("line {line}: unexpected content after the last job")]
    TrailingContent { line: usize },
    #[error("file is empty")]
    Empty,
}

/// Configuration problems detected before any work starts.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("population size must be a positive even number, got {0}")]
    PopulationSize(usize),
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("mutation probability must lie in [0, 1], got {0}")]
    MutationProbability(f64),
    #[error("gene bounds for {gene} are invalid: [{lo}, {hi}]")]
    GeneBounds {
        gene: &'static str,
        lo: f64,
        hi: f64,
    },
    #[error("training set is empty")]
    NoTraining,
    #[error("training instance {0} not found in suite")]
    UnknownInstance(String),
    #[error("unknown parameter set `{label}` (known: {known})")]
    UnknownLabel { label: String, known: String },
    #[error("cannot read parameter values `{0}`, expected `a1,a2,w,b`")]
    ParamValues(String),
    #[error(transparent)]
    Pso(#[from] PsoError),
}

/// Violations of the job-shop instance contract or of decoder inputs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("instance needs at least one job and one machine")]
    Empty,
    #[error("job {job} has {found} operations, expected {expected}")]
    RouteLength {
        job: usize,
        expected: usize,
        found: usize,
    },
    #[error("job {job}: machine {machine} out of range")]
    MachineOutOfRange { job: usize, machine: usize },
    #[error("job {job}: machine {machine} visited twice")]
    DuplicateMachine { job: usize, machine: usize },
    #[error("position has length {found}, expected {expected}")]
    PositionLength { expected: usize, found: usize },
    #[error("instance too large for exhaustive search: {ops} operations (limit {limit})")]
    TooLarge { ops: usize, limit: usize },
}
