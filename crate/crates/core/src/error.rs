use thiserror::Error;

/// Errors raised by the data model, the codecs and the learning-unlearning schemes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("class mismatch: expected {expected}, found {found}")]
    ClassMismatch { expected: String, found: String },

    #[error("example {0} lies outside the class domain")]
    OutOfDomain(String),

    #[error("dataset is not realizable by the class")]
    Unrealizable,

    #[error("enumeration of {needed} cases exceeds the cap of {cap}")]
    TooLarge { needed: u128, cap: u128 },

    #[error("class has no mergeable codec: {0}")]
    NoCodec(String),

    #[error("affine subspaces have an empty intersection")]
    EmptyIntersection,

    #[error("inconsistent tickets: {0}")]
    InconsistentTickets(String),

    #[error("malformed ticket: {0}")]
    MalformedTicket(String),

    #[error("malformed auxiliary state: {0}")]
    MalformedAux(String),

    #[error("chain gap: no ticket describes cell {0}")]
    ChainGap(usize),

    #[error("missing ticket for deleted value {0}")]
    MissingTicket(u64),

    #[error("auxiliary state is required when nothing is deleted")]
    AbsentAux,

    #[error("repeated example {0} in a repetition-free dataset")]
    RepeatedExample(String),

    #[error("duplicate index {0} in unlearning request")]
    DuplicateIndex(usize),

    #[error("value {value} exceeds cap {cap}")]
    OverCap { value: String, cap: u64 },

    #[error("size {m} outside segment range [{lo}, {hi}]")]
    OutOfRange { m: u64, lo: u64, hi: u64 },

    #[error("unknown scheme id `{0}`")]
    UnknownScheme(String),

    #[error("scheme `{scheme}` does not support {what}")]
    Unsupported { scheme: String, what: String },

    #[error("class has fewer than two distinct hypotheses")]
    TrivialClass,

    #[error("this learn state has already been unlearned once")]
    AlreadyUnlearned,

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
