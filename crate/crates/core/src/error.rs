use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("binomial row must be non-negative, got {0}")]
    NegativeRow(i64),
    #[error("Kronecker symbol is undefined for modulus 0")]
    ZeroModulus,
    #[error("invalid recurrence `{name}`: {reason}")]
    InvalidRecurrence { name: String, reason: String },
    #[error("`{name}` is not defined at index {index}")]
    OutOfDomain { name: String, index: i64 },
    #[error("cyclotomic moduli differ: {0} vs {1}")]
    ModulusMismatch(usize, usize),
    #[error("root set not Galois-closed: coefficient of x^{degree} is not an integer")]
    NotGaloisClosed { degree: usize },
    #[error("polynomial must be monic of degree >= 1")]
    NotMonic,
    #[error("no square root of {d} in the cyclotomic ring of order {order}")]
    NoSurd { d: i64, order: usize },
    #[error("value at residue {residue} is not in Q(sqrt {d})")]
    NotQuadratic { residue: usize, d: i64 },
    #[error("mixed discriminants {0} and {1}")]
    MixedDiscriminant(String, String),
    #[error("unknown sequence `{0}`")]
    UnknownSequence(String),
    #[error("sequence `{name}`: {reason}")]
    BadParams { name: String, reason: String },
    #[error("`{what}` is not an integer: {value}")]
    NonIntegral { what: String, value: String },
    #[error("surd part survives in `{what}`: {value}")]
    SurdResidue { what: String, value: String },
    #[error("b-file line {line}: {reason}")]
    BFileParse { line: usize, reason: String },
    #[error("invalid OEIS id `{0}` (expected A followed by six digits)")]
    InvalidId(String),
    #[error("network disabled and `{0}` is not cached")]
    NetworkDisabled(String),
    #[error("fetch failed: {0}")]
    Fetch(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
