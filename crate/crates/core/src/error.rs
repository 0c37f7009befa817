use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index:?} out of range for shape {shape:?}")]
    IndexOutOfRange { index: Vec<usize>, shape: Vec<usize> },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("layout mismatch: {0}")]
    Layout(String),

    #[error("operation requires a contiguous tensor; materialize a copy first")]
    RequiresCopy,

    #[error("cannot parse `{expr}`: {reason}")]
    Parse { expr: String, reason: String },

    #[error("invalid contraction path: {0}")]
    Path(String),

    #[error("expected {expected} arguments for the form, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("argument error: {0}")]
    Argument(String),

    #[error("mode error: {0}")]
    Mode(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unsupported spatial dimension {0}")]
    Dimension(usize),

    #[error("degenerate cell {cell}: non-positive Jacobian determinant {det:e}")]
    DegenerateCell { cell: usize, det: f64 },
}

impl Error {
    pub(crate) fn parse(expr: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            expr: expr.to_string(),
            reason: reason.into(),
        }
    }
}
