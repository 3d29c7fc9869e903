use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Odd codimensions give a potential that is singular at the origin.
    #[error("codimension m = {0} is odd; only even m >= 0 gives a regular potential")]
    OddCodimension(i64),

    #[error("codimension m = {0} is negative")]
    NegativeCodimension(i64),

    /// The deformation parameter must avoid the closed window [-1, 0].
    #[error("lambda = {0} lies in [-1, 0] (or is not finite); isospectral family requires lambda > 0 or lambda < -1")]
    SingularLambda(f64),

    #[error("quantum number n = {n} is not valid for the {family} family (minimum {min})")]
    InvalidQuantumNumber {
        family: &'static str,
        n: i64,
        min: i64,
    },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} > tolerance {tolerance:e}")]
    NonConvergence {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    #[error("grid half-width {half_width} too narrow: classically allowed region reaches |x| = {turning_point:.3}, margin {margin} required")]
    GridTooNarrow {
        half_width: f64,
        turning_point: f64,
        margin: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
