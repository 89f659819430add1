//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Error`]; numerical
//! failures are never signalled through NaN or silent defaults.

use core::fmt;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An operation received an empty input it cannot act on.
    EmptyInput(&'static str),
    /// Paired inputs disagree in length.
    LengthMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },
    /// Matrix dimensions are incompatible with the requested operation.
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    /// A matrix expected to be symmetric is not, within tolerance.
    NotSymmetric { max_rel_asym: f64 },
    /// Cholesky factorization hit a non-positive pivot.
    NotPositiveDefinite { pivot: usize },
    /// A triangular solve hit a zero diagonal entry.
    SingularDiagonal { index: usize },
    /// A scalar parameter is outside its domain.
    InvalidParameter { name: &'static str },
    /// An argument fell outside a special function's domain.
    Domain { what: &'static str },
    /// A truncation interval is empty or inverted.
    EmptyInterval,
    /// A bounding-box axis has zero range.
    DegenerateAxis { axis: usize },
    /// A partition cell has a non-positive edge length.
    NonPositiveEdge { axis: usize },
    /// The graph is not decomposable (chordality/RIP violation at `vertex`).
    NotDecomposable { vertex: usize },
    /// An edge-list file failed to parse.
    GraphParse { line: usize, what: &'static str },
    /// The hyper-inverse-Wishart prior density is only implemented for an
    /// identity scale matrix.
    NonIdentityScale,
    /// Bridge sampling did not converge within the iteration cap; carries the
    /// last iterate so callers can report it (flagged, never silently used).
    BridgeNonConvergence {
        last_estimate: f64,
        iterations: usize,
    },
    /// The bridge or importance weights degenerated (all zero / non-finite).
    DegenerateWeights(&'static str),
    /// The concentration set contains no posterior samples.
    EmptyConcentrationSet,
    /// A quadrature grid evaluated the integrand to NaN or +inf.
    NonFiniteIntegrand,
    /// The requested dimension exceeds what the method supports.
    UnsupportedDimension { dim: usize, max: usize },
    /// A Monte Carlo estimate of a probability came out exactly zero.
    ZeroProbabilityEstimate,
    /// The model does not expose a fully normalized posterior density.
    NoPosteriorDensity,
    /// A point lies outside the model's support.
    OutsideSupport,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::LengthMismatch {
                context,
                left,
                right,
            } => write!(f, "length mismatch in {context}: {left} vs {right}"),
            Error::DimensionMismatch {
                context,
                expected,
                got,
            } => write!(f, "dimension mismatch in {context}: expected {expected}, got {got}"),
            Error::NotSymmetric { max_rel_asym } => {
                write!(f, "matrix not symmetric (max relative asymmetry {max_rel_asym:e})")
            }
            Error::NotPositiveDefinite { pivot } => {
                write!(f, "matrix not positive definite (pivot {pivot})")
            }
            Error::SingularDiagonal { index } => {
                write!(f, "singular triangular matrix (zero diagonal at {index})")
            }
            Error::InvalidParameter { name } => write!(f, "invalid parameter: {name}"),
            Error::Domain { what } => write!(f, "domain error: {what}"),
            Error::EmptyInterval => write!(f, "empty truncation interval"),
            Error::DegenerateAxis { axis } => {
                write!(f, "degenerate bounding box: axis {axis} has zero range")
            }
            Error::NonPositiveEdge { axis } => {
                write!(f, "cell has non-positive edge length on axis {axis}")
            }
            Error::NotDecomposable { vertex } => {
                write!(f, "graph is not decomposable (violation at vertex {vertex})")
            }
            Error::GraphParse { line, what } => {
                write!(f, "edge-list parse error at line {line}: {what}")
            }
            Error::NonIdentityScale => {
                write!(f, "hyper-inverse-Wishart prior density requires an identity scale matrix")
            }
            Error::BridgeNonConvergence {
                last_estimate,
                iterations,
            } => write!(
                f,
                "bridge sampling did not converge after {iterations} iterations (last iterate {last_estimate})"
            ),
            Error::DegenerateWeights(what) => write!(f, "degenerate weights: {what}"),
            Error::EmptyConcentrationSet => {
                write!(f, "concentration set contains no posterior samples")
            }
            Error::NonFiniteIntegrand => write!(f, "integrand evaluated to NaN or +inf on the grid"),
            Error::UnsupportedDimension { dim, max } => {
                write!(f, "dimension {dim} unsupported (max {max})")
            }
            Error::ZeroProbabilityEstimate => {
                write!(f, "Monte Carlo probability estimate is exactly zero")
            }
            Error::NoPosteriorDensity => {
                write!(f, "model does not expose a normalized posterior density")
            }
            Error::OutsideSupport => write!(f, "point lies outside the model support"),
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
