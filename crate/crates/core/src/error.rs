use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("relation `{name}` has arity {expected}, got {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("tuple of length {found} given for arity {expected}")]
    TupleLength { expected: usize, found: usize },
    #[error("element {element} out of range for universe of size {universe}")]
    ElementOutOfRange { element: usize, universe: usize },
    #[error("{what} is {needed}, above the cap of {cap}")]
    CapExceeded {
        what: String,
        needed: u128,
        cap: u128,
    },
    #[error("unknown relation symbol `{0}`")]
    UnknownRelation(String),
    #[error("unknown element name `{0}`")]
    UnknownElement(String),
    #[error("free variable `{0}` is not in the variable context")]
    UnboundVariable(String),
    #[error("variable `{0}` occurs twice in the context")]
    DuplicateVariable(String),
    #[error("formula is not a sentence; free variables: {0:?}")]
    NotASentence(Vec<String>),
    #[error("relation is not invariant under the automorphism group")]
    NotDefinable,
    #[error("invalid coordinate map: {0}")]
    InvalidCoordinates(String),
    #[error("name `{0}` is already in use")]
    NameClash(String),
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("relations live over universes of size {left} and {right}")]
    UniverseMismatch { left: usize, right: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
}

impl Error {
    /// True for the errors that stem from a resource cap rather than bad input.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::InstanceTooLarge(_))
    }

    pub(crate) fn cap(what: impl Into<String>, needed: u128, cap: u128) -> Self {
        Error::CapExceeded {
            what: what.into(),
            needed,
            cap,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
