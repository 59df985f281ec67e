use thiserror::Error;

/// Errors shared across the solver and diagnostic layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("offset too large: no interior node has both neighbors")]
    StepTooLarge,
    #[error("Newton diverged at time level {level}: residual {residual:.3e} after {iters} iterations")]
    NewtonDiverged {
        level: usize,
        residual: f64,
        iters: usize,
    },
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("Picard iteration stalled at time level {level}: update {update:.3e} after {iters} iterations")]
    PicardStalled {
        level: usize,
        update: f64,
        iters: usize,
    },
    #[error("projected relaxation did not converge: defect {defect:.3e} after {iters} iterations")]
    NotConverged { iters: usize, defect: f64 },
    #[error("missing derivative data: {0}")]
    MissingDerivativeData(String),
    #[error("radii unresolvable on this grid: {0}")]
    RadiiUnresolvable(String),
    #[error("field does not vanish at the requested center: |w| = {value:.3e} exceeds {limit:.3e}")]
    CenterNotZero { value: f64, limit: f64 },
    #[error("time strip extends outside the grid: need t >= {needed:.6}, grid starts at {t0:.6}")]
    StripOutsideGrid { needed: f64, t0: f64 },
    #[error("free boundary is empty: no interface points in any snapshot")]
    EmptyFreeBoundary,
    #[error("rescaled window maps outside the grid (r = {r})")]
    WindowOutsideGrid { r: f64 },
    #[error("eigenvalue iteration stalled after {iters} iterations (last change {change:.3e})")]
    IterationStalled { iters: usize, change: f64 },
    #[error("invalid configuration at `{path}`: {reason}")]
    ConfigInvalid { path: String, reason: String },
    #[error("non-finite value produced by {0}")]
    NonFinite(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
