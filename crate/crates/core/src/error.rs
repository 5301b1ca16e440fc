use thiserror::Error;

/// Everything that can go wrong inside the core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alpha = {0} outside the valid range (1, 2]")]
    Alpha(f64),
    #[error("kappa = {0} must be positive and finite")]
    Kappa(f64),
    #[error("chi = {0} outside [-1, 1]")]
    Chi(f64),
    #[error("beta = {beta} must exceed -(alpha+1)/2 = {bound}")]
    Beta { beta: f64, bound: f64 },
    #[error("beta = {0} <= -1 needs a positive principal-value radius")]
    PrincipalValue(f64),
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("gamma function pole at {0}")]
    GammaPole(f64),
    #[error("quadrature on [{a}, {b}] stopped at estimated error {error:e} after {intervals} intervals")]
    Quadrature {
        a: f64,
        b: f64,
        error: f64,
        intervals: usize,
    },
    #[error("path on stream {0} produced a non-finite value")]
    NonFinite(u64),
    #[error("series of length {got} does not match grid of {expected} points")]
    Length { expected: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain { name, value, expected }
}
