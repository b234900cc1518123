use num_complex::Complex64;
use thiserror::Error;

use crate::power_series::SeriesError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Series(#[from] SeriesError),

    #[error("point {z} lies outside the closed unit disk")]
    OutsideDisk { z: Complex64 },
    #[error("invalid map parameters: {0}")]
    InvalidMap(String),
    #[error("images of maps {i} and {j} are not disjoint (margin {margin:e})")]
    OverlappingImages { i: usize, j: usize, margin: f64 },
    #[error("pole of the Moebius transform lies in the closed image of map {0}")]
    PoleInImage(usize),
    #[error("Moebius determinant {0:e} is degenerate")]
    DegenerateMobius(f64),
    #[error("derivative at the origin {0:e} is too small")]
    DegenerateDerivative(f64),
    #[error("centers of maps {0} and {1} coincide")]
    DegenerateCenters(usize, usize),
    #[error("rigging needs at least {needed} maps, found {found}")]
    TooFewMaps { needed: usize, found: usize },
    #[error("index {index} out of range for {n} maps")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("too few boundary samples: {0} (need at least 64)")]
    TooFewSamples(usize),

    #[error("element lives in the wrong Bergman space")]
    WrongSpace,
    #[error("inner product of elements from different spaces")]
    SpaceMismatch,
    #[error("quadrature resolution too low: radial {radial}, angular {angular}")]
    ResolutionTooLow { radial: usize, angular: usize },

    #[error("rigging is not certified as disjoint")]
    RiggingNotCertified,
    #[error("series expansion of block ({j},{i}) is ill-conditioned: {source}")]
    SeriesIllConditioned {
        j: usize,
        i: usize,
        source: SeriesError,
    },
    #[error("map {index} carries a series of order {available}, order {needed} is required")]
    InsufficientSeriesOrder {
        index: usize,
        needed: usize,
        available: usize,
    },
    #[error("quadrature for block ({j},{i}) diverged: residual {residual:e}")]
    QuadratureDiverged { j: usize, i: usize, residual: f64 },
    #[error("power iteration stalled with relative change {0:e}")]
    PowerIterationStalled(f64),
    #[error("truncation order must be at least {min}, got {got}")]
    OrderTooSmall { min: usize, got: usize },
    #[error("pairwise derivative products are inconsistent (relative residual {0:e})")]
    InconsistentProducts(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("operator shape {found} does not match {expected}")]
    ShapeMismatch { expected: String, found: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Errors caused by invalid input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Series(_)
                | Error::SeriesIllConditioned { .. }
                | Error::QuadratureDiverged { .. }
                | Error::PowerIterationStalled(_)
                | Error::InconsistentProducts(_)
        )
    }
}
