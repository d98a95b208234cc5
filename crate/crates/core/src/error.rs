//! Error types shared across the engine.

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by model operations, ingestion, and queries.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Caller-supplied input is malformed (empty name, unknown format, bad flag value).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An identifier or triple already exists.
    #[error("conflict: {0}")]
    Conflict(String),

    /// The referenced element, relationship, view, or stereotype does not exist.
    #[error("not found: {0}")]
    NotFound(String),

    /// A relationship or view member points at an id absent from the model.
    #[error("dangling reference: {0}")]
    DanglingReference(String),

    /// The endpoint kinds of a relationship violate the kind-constraint table,
    /// or a stereotype was applied to an element of the wrong kind.
    #[error("constraint violation: {0}")]
    Constraint(String),

    /// Refused removal: the element is still referenced.
    #[error("element {id} is referenced by: {referrers}", referrers = .referrers.join(", "))]
    Referenced { id: String, referrers: Vec<String> },

    /// Two declared elements claim the same observed match key.
    #[error("ambiguous match key {key}: declared by {elements}", elements = .elements.join(" and "))]
    AmbiguousMatchKey { key: String, elements: Vec<String> },

    /// A document failed to parse; position is 1-based.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// The file declares a schema version newer than this build supports.
    #[error("unsupported schema version {found} (supported up to {supported})")]
    Version { found: String, supported: String },

    /// A change-set operation failed; the whole set was rolled back.
    #[error("change set aborted at op {index}: {reason}")]
    ChangeSetAborted { index: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse_from_json(err: &serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
