use thiserror::Error;

pub type Result<T> = std::result::Result<T, DataError>;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: parse error: {detail}")]
    Parse {
        path: String,
        line: usize,
        detail: String,
    },

    #[error("duplicate video_id {video_id:?} (lines {first_line} and {second_line})")]
    DuplicateId {
        video_id: String,
        first_line: usize,
        second_line: usize,
    },

    #[error("record {video_id:?}: driving_video_id {driving_video_id:?} does not exist")]
    DanglingDrivingRef {
        video_id: String,
        driving_video_id: String,
    },

    #[error("record {video_id:?}: driving_video_id {driving_video_id:?} is not a real record")]
    DrivingRefNotReal {
        video_id: String,
        driving_video_id: String,
    },

    #[error("record {video_id:?}: {detail}")]
    SchemaViolation { video_id: String, detail: String },

    #[error("record {video_id:?} is not a fake video")]
    NotFake { video_id: String },

    #[error("unknown video_id {video_id:?}")]
    UnknownVideo { video_id: String },

    #[error("manifest has no records")]
    EmptyManifest,

    #[error("metrics undefined: {detail}")]
    ZeroDenominator { detail: String },

    #[error("no confusion matrix matches the target metrics: {detail}")]
    NoMatch { detail: String },

    #[error("ambiguous reconstruction: {detail}")]
    AmbiguousMatch { detail: String },

    #[error("invalid parameter: {detail}")]
    InvalidParameter { detail: String },
}

impl DataError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        DataError::Io {
            path: path.into(),
            source,
        }
    }
}
