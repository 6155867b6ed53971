use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by frontends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Domain,
    Numerical,
    Data,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical instability at x = {x}: {detail}")]
    NumericalInstability { x: f64, detail: String },

    #[error("precision lost for x >= {x}: {detail}")]
    PrecisionLoss { x: f64, detail: String },

    #[error("degenerate regime ({parameter}): {detail}")]
    DegenerateRegime { parameter: &'static str, detail: String },

    #[error("singular pencil: A + B is not positive definite (pivot {pivot} at index {index})")]
    SingularPencil { index: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("table format error on line {line}: {detail}")]
    TableFormat { line: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain(_) | Error::Precondition(_) | Error::DimensionMismatch { .. } => {
                ErrorKind::Domain
            }
            Error::NumericalInstability { .. }
            | Error::PrecisionLoss { .. }
            | Error::DegenerateRegime { .. }
            | Error::SingularPencil { .. } => ErrorKind::Numerical,
            Error::TableFormat { .. } | Error::Io(_) => ErrorKind::Data,
        }
    }

    /// Short stable identifier for machine-readable error lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::NumericalInstability { .. } => "numerical-instability",
            Error::PrecisionLoss { .. } => "precision-loss",
            Error::DegenerateRegime { .. } => "degenerate-regime",
            Error::SingularPencil { .. } => "singular-pencil",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::TableFormat { .. } => "table-format",
            Error::Io(_) => "io",
        }
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
