use thiserror::Error;

/// Errors surfaced by the numerical pipeline.
#[derive(Debug, Error)]
pub enum GlsmError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("no nondegenerate screen complement found after {retries} re-rotations")]
    DegenerateScreen { retries: usize },

    #[error("singular pairing between transversal candidates and the radical basis")]
    SingularPairing,

    #[error("Jacobian rank {rank} < chart dimension {expected} at {point:?}")]
    RankDeficient {
        rank: usize,
        expected: usize,
        point: Vec<f64>,
    },

    #[error("ambient metric is singular at {point:?}")]
    SingularMetric { point: Vec<f64> },

    #[error("chart point {point:?} too close to the domain boundary for the FD stencil")]
    StepUnderflow { point: Vec<f64> },

    #[error("frame matrix is singular (invalid decomposition)")]
    FrameSingular,

    #[error("expression evaluation: {0}")]
    Eval(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("verifier invoked on an instance that is not of the required class: {0}")]
    ClassMismatch(String),

    #[error("configuration invalid:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
}

pub type Result<T> = std::result::Result<T, GlsmError>;
