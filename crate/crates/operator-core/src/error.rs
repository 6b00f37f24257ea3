use thiserror::Error;

/// Failure modes shared by every layer of the index pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("mixed backends: embed the dense operator into the lattice first")]
    MixedBackend,
    #[error("not trace class: {0}")]
    NotTraceClass(String),
    #[error("operator is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("function undefined at spectral point {0}")]
    FunctionUndefined(f64),
    #[error("missing asymptotic declaration: {0}")]
    MissingAsymptotics(String),
    #[error("lattice operator must be diagonal: {0}")]
    NotDiagonal(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("product {0} * {1} leaves the alphabet")]
    Closure(String, String),
    #[error("no operator bound to label {0:?}")]
    UnboundLabel(String),
    #[error("parity mismatch: {0}")]
    ParityMismatch(String),
    #[error("not idempotent (defect {0:.3e})")]
    NotIdempotent(f64),
    #[error("not invertible: {0}")]
    Singular(String),
    #[error("degree {degree} violates summability p = {p}")]
    DegreeTooLow { degree: usize, p: f64 },
    #[error("degree {0} exceeds the supported simplex dimension")]
    DegreeTooLarge(usize),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("symbol vanishes on the circle (min modulus {0:.3e})")]
    SymbolVanishes(f64),
    #[error("winding quadrature bound {0:.3e} is not below 1/2")]
    WindingBound(f64),
    #[error("empty symbol")]
    EmptySymbol,
    #[error("basis inadequate (condition number {0:.3e})")]
    BasisInadequate(f64),
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("pole misdeclared (two-radius discrepancy {0:.3e})")]
    PoleMisdeclared(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
