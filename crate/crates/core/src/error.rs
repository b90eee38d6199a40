use thiserror::Error;

/// Errors raised by the algebra engine and its file formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is reducible over GF({0})")]
    ReducibleModulus(u32),
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("field order {0} is not supported (must be a prime power <= 65536)")]
    FieldTooLarge(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("operands live in different ambient algebras")]
    AmbientMismatch,
    #[error("substitution with a constant term is not an endomorphism of the nonunitary algebra")]
    AmbientViolation,
    #[error("expansion exceeds {0} terms")]
    ExpansionOverflow(usize),
    #[error("parameter assignment violates schema constraints: {0}")]
    ConstraintViolation(String),
    #[error("malformed generator schema: {0}")]
    BadSchema(String),
    #[error("oracle enumeration too large: {0}")]
    OracleTooLarge(String),
    #[error("family {family} requires characteristic {need}, field has characteristic {have}")]
    BadCharacteristic { family: String, need: u32, have: u32 },
    #[error("bad family parameters: {0}")]
    BadParams(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown name `{0}`")]
    UnknownLabel(String),
    #[error("step {step} references `{label}`, which is not defined by an earlier step")]
    ForwardReference { step: usize, label: String },
    #[error("rewrite rule is unsound at exponent {0}")]
    UnsoundRule(u64),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
