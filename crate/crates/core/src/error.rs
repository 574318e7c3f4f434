use thiserror::Error;

/// Byte range into the original input text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

impl std::fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {span}: {message}")]
    Syntax { span: SourceSpan, message: String },

    #[error("dialect violation: {0}")]
    Dialect(String),

    #[error("formula is not in prenex form: {0}")]
    NotPrenex(String),

    #[error("quantifier under temporal operator: {0}")]
    QuantifierUnderTemporal(String),

    #[error("unbound variable: {0}")]
    UnboundVariable(String),

    #[error("empty trace-set model (pass allow_empty to evaluate anyway)")]
    EmptyModel,

    #[error("quantification over the empty word")]
    EmptyWordQuantification,

    #[error("universe built over a different transition system")]
    UniverseMismatch,

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("sort error: {0}")]
    SortError(String),

    #[error("unsupported formula shape: {0}")]
    UnsupportedShape(String),

    #[error("missing hierarchy witness sentence (required for n > 1)")]
    MissingWitness,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
