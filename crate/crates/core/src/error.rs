use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph is disconnected: vertex {vertex} is unreachable from vertex 0")]
    Disconnected { vertex: usize },

    #[error("invalid edge ({u}, {v}): {reason}")]
    InvalidEdge { u: usize, v: usize, reason: String },

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("no connected G({n}, {p}) sample after {attempts} attempts")]
    RetriesExhausted { n: usize, p: f64, attempts: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("torus experiment needs dimension >= 3, got {0}")]
    InvalidDimension(usize),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("operation requires a {expected} kernel, got {found}")]
    WrongVariant {
        expected: &'static str,
        found: &'static str,
    },

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    BadVertex { vertex: usize, n: usize },

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("time {0} must be a whole number of steps for a discrete-time chain")]
    NonIntegerTime(f64),

    #[error("invalid probability vector: {0}")]
    InvalidMeasure(String),

    #[error("invalid start scheme: {0}")]
    InvalidScheme(String),

    #[error("coupling table with {entries} entries exceeds the {limit} entry limit")]
    TableTooLarge { entries: u128, limit: u128 },

    #[error("symmetric eigensolver failed: {0}")]
    EigenFailure(String),

    #[error("moment pairing ({t}, {s}) has mixed parity for a plain discrete chain")]
    ParityViolation { t: u64, s: u64 },

    #[error("enumeration too large: {0}")]
    TooLarge(String),

    #[error("plain discrete chain needs an even total lifespan, got {total}")]
    CaseViolation { total: u64 },

    #[error("assumption violated: {0}")]
    AssumptionViolation(String),

    #[error("fewer than three usable gap points ({usable}) for an exponential fit")]
    DegenerateFit { usable: usize },

    #[error("samples were not retained for this estimate")]
    SamplesNotRetained,

    #[error("unrecognized value {0:?}")]
    Unrecognized(String),

    #[error("invalid job: {0}")]
    InvalidJob(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
