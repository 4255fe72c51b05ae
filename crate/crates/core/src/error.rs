use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("extension degree {0} outside the supported range 2..=16")]
    DegreeOutOfRange(u32),
    #[error("polynomial {poly:#x} does not have degree {m}")]
    PolynomialDegree { poly: u32, m: u32 },
    #[error("polynomial {poly:#x} is not primitive: x has order {order}")]
    NonPrimitivePolynomial { poly: u32, order: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("no element of order {n} in GF(2^{m})")]
    OrderUnavailable { n: usize, m: u32 },
    #[error("invalid transform length {0}")]
    InvalidLength(usize),
    #[error("no cyclic convolution algorithm of length {0}")]
    UnsupportedLength(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("bad factorization {factors:?} of {n}")]
    BadFactorization { n: usize, factors: Vec<usize> },
    #[error("input index {0} is declared zero but holds a nonzero value")]
    NonzeroDeclaredZero(usize),
    #[error("length mismatch: expected {expected} symbols, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid code parameters: {0}")]
    InvalidCode(String),
    #[error("locator/evaluator pair is inconsistent: odd part vanishes at a root")]
    InconsistentPair,
    #[error("malformed plan file: {0}")]
    PlanFormat(String),
    #[error("malformed symbol stream: {0}")]
    StreamFormat(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
