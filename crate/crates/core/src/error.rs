use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh dimension must be 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("axis {axis}: at least two breakpoints are required")]
    TooFewBreakpoints { axis: usize },
    #[error("axis {axis}: breakpoints must be strictly increasing (violated at index {index})")]
    NonIncreasing { axis: usize, index: usize },
    #[error("axis {axis}: non-finite breakpoint at index {index}")]
    NonFinite { axis: usize, index: usize },
    #[error("axis {axis}: invalid stretch parameters ({reason})")]
    BadStretch { axis: usize, reason: String },
    #[error("unknown face: direction {dir}, index {index}")]
    UnknownFace { dir: usize, index: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("non-finite sample of projected data at {point:?}")]
    QuadratureFailure { point: [f64; 3] },
    #[error("field length {got} does not match entity count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("quadrature order must be at least 1")]
    BadQuadratureOrder,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("viscosity law returned {value} at density {rho}")]
    BadViscosity { rho: f64, value: f64 },
    #[error("unknown advection scheme '{0}' (expected 'centered' or 'upwind')")]
    BadScheme(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("transport matrix is singular or ill-conditioned (condition estimate {condition:.3e})")]
    SingularTransport { condition: f64 },
    #[error("saddle-point factorization failed: constraint block is singular")]
    SingularSaddle,
    #[error("linear solve residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    LinearResidual { residual: f64, tolerance: f64 },
    #[error("nonlinear iteration did not converge in {iterations} iterations (last residual {residual:.3e})")]
    PicardDiverged { iterations: usize, residual: f64 },
    #[error("invalid solver configuration: {0}")]
    BadConfig(String),
    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<SolverError>,
    },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}
