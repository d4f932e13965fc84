use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate nodes")]
    DegenerateNodes,
    #[error("degenerate spectrum")]
    DegenerateSpectrum,
    #[error("instance too large for exact oracle ({estimated:.3e} states, cap {cap:.3e})")]
    TooLarge { estimated: f64, cap: f64 },
    #[error("dimension error: expected n = {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("moment functional not quasi-definite (vanishing Hankel determinant at order {0})")]
    NotQuasiDefinite(usize),
    #[error("recursion lost positivity at index {0}")]
    RecursionBreakdown(usize),
    #[error("no interior maximum found")]
    NoInteriorMaximum,
    #[error("divergent integral: {0}")]
    Divergent(String),
    #[error("alternating series loses too many digits; use quadrature branch")]
    UseQuadrature,
    #[error("resource error: {0}")]
    Resource(String),
    #[error("singular matrix")]
    Singular,
}

pub type Result<T> = std::result::Result<T, Error>;
