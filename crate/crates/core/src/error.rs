use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis is singular")]
    SingularBasis,

    #[error("dimension {n} exceeds the enumeration limit {limit}")]
    DimensionLimit { n: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid has {points} points, above the memory budget of {budget}")]
    GridTooLarge { points: u128, budget: usize },

    #[error("denominator 2^{log_den} exceeds the grid resolution 2^{m}")]
    DenominatorTooLarge { log_den: u32, m: u32 },

    #[error("projection onto the zero vector")]
    ZeroVector,

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not symmetric: |M[{i}][{j}] - M[{j}][{i}]| = {delta:e}")]
    Asymmetric { i: usize, j: usize, delta: f64 },

    #[error("unknown adversarial witness kind `{0}`")]
    UnknownKind(String),

    #[error("ball sampler gave up after {0} retries")]
    SamplerExhausted(usize),

    #[error("expected {expected} registers, got {got}")]
    RegisterMismatch { expected: usize, got: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// True for errors caused by the filesystem rather than by the input.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}
