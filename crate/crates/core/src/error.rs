use crate::Grid2D;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;

/// Errors produced by the numeric core.
#[derive(Debug, thiserror::Error)]
pub enum CoreError {
    #[error("empty grid: height and width must be at least 1")]
    EmptyGrid,

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: Grid2D, right: Grid2D },

    #[error("shape mismatch: {detail}")]
    ShapeMismatch { detail: String },

    #[error("buffer length {actual} does not match grid {grid} with {channels} channel(s)")]
    BadBufferLength {
        grid: Grid2D,
        channels: usize,
        actual: usize,
    },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("negative heatmap value at index {index}")]
    NegativeHeatmap { index: usize },

    #[error("degenerate heatmap: all values are zero")]
    DegenerateHeatmap,

    #[error("rank-deficient region: eigenvalue {eigenvalue:e} below floor {floor:e}")]
    RankDeficient { eigenvalue: f64, floor: f64 },

    #[error("covariance is not symmetric: |c01 - c10| = {skew:e}")]
    AsymmetricCovariance { skew: f64 },

    #[error("covariance is not positive semi-definite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },

    #[error("affine does not factor the covariance: relative error {error:e}")]
    AffineCovarianceMismatch { error: f64 },

    #[error("singular driving affine (|det| = {det:e})")]
    SingularAffine { det: f64 },

    #[error("region count mismatch: {motions} motions vs {weights} weight maps")]
    RegionCountMismatch { motions: usize, weights: usize },

    #[error("all-zero weights at pixel ({row}, {col}) in distribution mode")]
    ZeroWeights { row: usize, col: usize },

    #[error("invalid parameter: {detail}")]
    InvalidParameter { detail: String },

    #[error("confidence value {value} at index {index} outside [0, 1]")]
    ConfidenceRange { value: f64, index: usize },

    #[error("image too small: {grid} (minimum {min_side} per side)")]
    ImageTooSmall { grid: Grid2D, min_side: usize },

    #[error("face box {detail} does not intersect the frame")]
    BoxOutsideFrame { detail: String },

    #[error("bad file format: {detail}")]
    BadFormat { detail: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("image codec error on {path}: {source}")]
    Codec {
        path: String,
        #[source]
        source: image::ImageError,
    },
}

impl CoreError {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CoreError::Io {
            path: path.into(),
            source,
        }
    }
}
