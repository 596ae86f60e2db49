use thiserror::Error;

/// Error kinds shared by every crate of the workspace.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("point is not in the rational span (residual {residual:.3e})")]
    NotInSpan { residual: f64 },
    #[error("ambiguous resonance: {0}")]
    AmbiguousResonance(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("truncation error: grid radius {required_radius} required")]
    TruncationError { required_radius: usize },
    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),
    #[error("empty cluster: {0}")]
    EmptyCluster(String),
    #[error("point outside chart ball (distance {distance:.3e}, radius {radius:.3e})")]
    OutOfChart { distance: f64, radius: f64 },
    #[error("chart solve did not converge: {0}")]
    ChartSingular(String),
    #[error("shape mismatch: {0}")]
    ShapeError(String),
    #[error("configuration error: {0}")]
    ConfigError(String),
    #[error("dominant fiber carries only {mass:.4} of the mass")]
    AmbiguousExtraction { mass: f64 },
    #[error("integer overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
