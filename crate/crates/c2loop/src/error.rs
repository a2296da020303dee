use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomials belong to different variable registries")]
    RegistryMismatch,
    #[error("exact division failed: {0}")]
    NotDivisible(String),
    #[error("division by zero")]
    DivZero,
    #[error("no value assigned to variable {0}")]
    MissingAssignment(String),
    #[error("negative value under square root for {0}")]
    NegativeUnderRoot(String),
    #[error("missing value for vertex {0}")]
    MissingValue(usize),
    #[error("weights are not free-fermionic: {0}")]
    NotFreeFermionic(String),
    #[error("a train track closes into a loop")]
    LoopTrackPresent,
    #[error("inconsistent linear system")]
    Inconsistent,
    #[error("odd number of vertices, no perfect matching")]
    OddVertexCount,
    #[error("blue path set is not realizable")]
    UnrealizablePaths,
    #[error("edge {0} is not a road")]
    NotARoad(usize),
    #[error("no Kasteleyn orientation exists")]
    NotFound,
    #[error("window too small: radius {0} < {1}")]
    WindowTooSmall(i64, i64),
    #[error("vertex {0:?} cannot be flipped")]
    NotFlippable([i64; 3]),
    #[error("non-positive value {0} in numeric recurrence")]
    NonPositive(f64),
    #[error("reconstruction stuck: {0}")]
    Stuck(String),
    #[error("not a monomial of the partition function: {0}")]
    NotAMonomial(String),
    #[error("configuration has {0} loops")]
    HasLoops(usize),
    #[error("intrinsic relation violated: residual {0}")]
    IntrinsicViolated(f64),
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Input(e.to_string())
    }
}
