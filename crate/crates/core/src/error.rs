use thiserror::Error;

/// Errors raised across the crate.
///
/// The variants split into two groups that the command-line front end maps to
/// distinct exit codes: input/parameter problems (`exit_code() == 2`) and
/// failed certifications of theorem hypotheses (`exit_code() == 3`).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed vertex encoding: {0}")]
    Encoding(String),
    #[error("graph family mismatch: {0}")]
    FamilyMismatch(String),
    #[error("graph mismatch: {0}")]
    GraphMismatch(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("matrix is not irreducible: {0}")]
    Irreducible(String),
    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("no positive return probability up to n = {0}")]
    NoReturn(usize),
    #[error("truncated state space exceeds {0} states")]
    StateSpaceTooLarge(usize),
    #[error("dynamic program exceeds the memory budget of {0} MiB")]
    MemoryBudget(usize),
    #[error("graph is not deterministic: {0}")]
    NotDeterministic(String),
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("vertex {to} is not reachable from {from}")]
    Unreachable { from: usize, to: usize },
    #[error("nonpositive harmonic vector entry at index {0}")]
    Domain(usize),
    #[error("hypotheses violated: {}", .0.join("; "))]
    Hypothesis(Vec<String>),
    #[error("invalid presentation: {0}")]
    Presentation(String),
    #[error("invalid group: {0}")]
    Group(String),
    #[error("word length {n} exceeds the trust horizon {radius} of a truncated graph")]
    Horizon { n: usize, radius: usize },
    #[error("count overflow at length {0}")]
    Overflow(usize),
    #[error("{0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the CLI for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Hypothesis(_) | Error::NotStronglyConnected | Error::NotDeterministic(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
