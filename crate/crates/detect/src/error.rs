use thiserror::Error;

pub type Result<T> = std::result::Result<T, DetectError>;

#[derive(Debug, Error)]
pub enum DetectError {
    #[error(transparent)]
    Core(#[from] smf_core::CoreError),

    #[error(transparent)]
    Data(#[from] smf_data::DataError),

    #[error("frame must be 96x96 single-channel, got {got}")]
    WrongFrameSize { got: String },

    #[error("no frames found in {dir}")]
    EmptyFrameDir { dir: String },

    #[error("training data must contain both classes ({detail})")]
    SingleClass { detail: String },

    #[error("training data is empty")]
    EmptyTrainingData,

    #[error("infeasible split: {detail}")]
    InfeasibleSplit { detail: String },

    #[error("bad model format: {detail}")]
    BadModelFormat { detail: String },

    #[error("invalid parameter: {detail}")]
    InvalidParameter { detail: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl DetectError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        DetectError::Io {
            path: path.into(),
            source,
        }
    }
}
