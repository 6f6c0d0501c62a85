use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable contexts differ: [{left}] vs [{right}]")]
    ContextMismatch { left: String, right: String },

    #[error("invalid variable context: {0}")]
    InvalidContext(String),

    #[error("expected {expected} exponents or coordinates, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("no Laurent polynomial quotient exists")]
    NotDivisible,

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,

    #[error("no image given for variable `{0}`")]
    MissingImage(String),

    #[error("image of `{0}` is not a unit monomial")]
    InvalidImage(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("evaluation point has a zero coordinate at `{0}`")]
    ZeroCoordinate(String),

    #[error("exchange type requires b, c >= 1 (got b = {b}, c = {c})")]
    InvalidExchangeType { b: i64, c: i64 },

    #[error("vertex {0} does not exist in this quiver")]
    InvalidVertex(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("quiver has an oriented cycle")]
    Cyclic,

    #[error("Coxeter translate of {from:?} leaves the positive orthant: {to:?}")]
    NotTransjective { from: Vec<i64>, to: Vec<i64> },

    #[error("no rigid representative of dimension {dims:?} over F_{prime} after {trials} trials")]
    NotRigid { dims: Vec<i64>, prime: u64, trials: usize },

    #[error("dimension vector {0:?} has Euler form {1} != 1, not a real Schur root")]
    NotSchurRoot(Vec<i64>, i64),

    #[error("point counts for e = {e:?} are not polynomial in q: predicted {predicted} at q = {prime}, counted {counted}")]
    NotPolynomial {
        e: Vec<i64>,
        prime: u64,
        predicted: String,
        counted: String,
    },

    #[error("counting polynomial for e = {e:?} takes non-integral value {value} at q = 1")]
    NotIntegral { e: Vec<i64>, value: String },

    #[error("resolution budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures that mean "could not decide" rather than "checked and wrong".
    pub fn is_inconclusive(&self) -> bool {
        matches!(
            self,
            Error::NotRigid { .. }
                | Error::NotPolynomial { .. }
                | Error::NotIntegral { .. }
                | Error::BudgetExceeded(_)
                | Error::NotTransjective { .. }
        )
    }
}
