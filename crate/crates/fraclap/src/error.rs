use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at {0}")]
    GammaPole(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),

    #[error("singular linear system (pivot {pivot:e} at column {column})")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("target outside the domain closure: ({0}, {1})")]
    TargetOutside(f64, f64),

    #[error("single-layer system is numerically singular; rescale the geometry (logarithmic capacity close to 1)")]
    CapacityDegenerate,

    #[error("residual {residual:e} above tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("finite-difference step {0:e} too small")]
    StepUnderflow(f64),
}
