//! Library-wide error type.

use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// The CLI maps these onto its exit-code classes: configuration problems,
/// scenario-construction failures, and numeric failures.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, got {got}{}", ctx_suffix(.context))]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("point outside chart domain on axis {axis}: {value} not in [{lo}, {hi}]")]
    DomainViolation {
        axis: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("point too close to a non-periodic domain boundary for finite differencing (axis {axis}, value {value}, needs margin {margin})")]
    BoundaryMargin { axis: usize, value: f64, margin: f64 },

    #[error("matrix is singular or not positive definite ({context})")]
    SingularMatrix { context: &'static str },

    #[error("point is not on the hyperboloid: relative residual {residual:.3e} exceeds {tol:.3e}")]
    NotOnHyperboloid { residual: f64, tol: f64 },

    #[error("argument {name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("jet order {requested} unsupported (max {max})")]
    JetOrderUnsupported { requested: usize, max: usize },

    #[error("point cloud is empty ({context})")]
    EmptyCloud { context: &'static str },

    #[error("point clouds carry different metrics or dimensions ({context})")]
    CloudMismatch { context: &'static str },

    #[error("wavy-circle construction failed: {reason}")]
    WavyConstruction { reason: String },

    #[error("curve construction failed: {reason}")]
    CurveConstruction { reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("family spec error: {0}")]
    FamilySpec(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for GeomError {
    fn from(e: std::io::Error) -> Self {
        GeomError::Io(e.to_string())
    }
}

fn ctx_suffix(ctx: &str) -> String {
    if ctx.is_empty() {
        String::new()
    } else {
        format!(" ({ctx})")
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
