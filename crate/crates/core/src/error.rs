use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("bad reduction: {p} divides a denominator, choose another prime")]
    BadReduction { p: u32 },
    #[error("zero ideal: every form is zero")]
    ZeroIdeal,
    #[error("invalid dimensions: {0}")]
    Dimensions(String),
    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("singular {0} in group element")]
    Singular(&'static str),
    #[error("map is not injective on W")]
    NotInjective,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("torsion present, Hoppe inapplicable (codim D(A) = {codim})")]
    Torsion { codim: i64 },
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        msg: msg.into(),
    }
}
