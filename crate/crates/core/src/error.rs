use thiserror::Error;

/// Coarse error classes; the CLI maps each one to its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Precondition,
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("letter {letter} out of range 1..={k}")]
    LetterOutOfRange { letter: usize, k: usize },

    #[error("empty word")]
    EmptyWord,

    #[error("word {word} exceeds the catalog caps")]
    CapExceeded { word: String },

    #[error("tuple enumeration would visit about {estimate} tuples (limit {limit}); lower the word-length cap")]
    TooManyTuples { estimate: u128, limit: usize },

    #[error("empty catalog")]
    EmptyCatalog,

    #[error("Newton polytope is empty: no tuple has nonvanishing determinant at the base point (Hormander condition fails)")]
    EmptyPolytope,

    #[error("arity mismatch: polytope has k={expected}, vector has {found} entries")]
    ArityMismatch { expected: usize, found: usize },

    #[error("inadmissible exponent tuple: {0}")]
    Inadmissible(String),

    #[error("point lies in the Newton polytope; no separating functional exists")]
    NotSeparable,

    #[error("flow left the bounding region at time {time:.6}")]
    FlowDivergence { time: f64 },

    #[error("flow time {time} exceeds the configured maximum {max}")]
    FlowTimeTooLong { time: f64, max: f64 },

    #[error("chart differential is singular at t = {t:?} (condition number {condition:.3e})")]
    SingularChart { t: Vec<f64>, condition: f64 },

    #[error("empty point cloud")]
    EmptyCloud,

    #[error("projection {index} has zero measure")]
    ZeroProjection { index: usize },

    #[error("parse error{}: {message}", line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn parse(message: impl Into<String>) -> Self {
        Error::Parse { line: None, message: message.into() }
    }

    pub fn at_line(self, line: usize) -> Self {
        match self {
            Error::Parse { message, .. } => Error::Parse { line: Some(line), message },
            other => Error::Parse { line: Some(line), message: other.to_string() },
        }
    }

    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Parse { .. } => ErrorClass::Parse,
            FlowDivergence { .. } | SingularChart { .. } | EmptyCloud | ZeroProjection { .. } | Numerical(_) => {
                ErrorClass::Numerical
            }
            _ => ErrorClass::Precondition,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
