use thiserror::Error;

/// Errors produced anywhere in the rigging, rendering and fitting pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("topology mismatch: {0}")]
    TopologyMismatch(String),

    #[error("degenerate face {face} (area {area:e})")]
    DegenerateFace { face: usize, area: f64 },

    #[error("face map references face {face}, but only {count} frames exist")]
    IndexOutOfRange { face: usize, count: usize },

    #[error("all neighbors of sample at texel ({i}, {j}) are invalid")]
    AllNeighborsInvalid { i: usize, j: usize },

    #[error("zero-norm quaternion{}", texel.map(|(i, j)| format!(" at texel ({i}, {j})")).unwrap_or_default())]
    ZeroQuaternion { texel: Option<(usize, usize)> },

    #[error("covariance of gaussian {index} is not positive semi-definite")]
    NonPsd { index: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("image {width}x{height} is smaller than the {window}x{window} window")]
    ImageTooSmall {
        width: usize,
        height: usize,
        window: usize,
    },

    #[error("loss became non-finite at iteration {iteration}")]
    NonFiniteLoss { iteration: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: face has no texture coordinates")]
    MissingUv { line: usize },

    #[error("no texel pairs straddle a face boundary")]
    NoSeams,

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::AllNeighborsInvalid { .. }
                | Error::ZeroQuaternion { .. }
                | Error::NonPsd { .. }
                | Error::NonFiniteLoss { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
