use thiserror::Error;

pub type Result<T> = std::result::Result<T, TextError>;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("empty transcript: {which}")]
    EmptyTranscript { which: &'static str },

    #[error("both transcripts are empty")]
    BothEmpty,

    #[error("reference has {got} token(s), but {needed}-grams need at least {needed}")]
    ReferenceTooShort { needed: usize, got: usize },

    #[error("no records to aggregate")]
    EmptyRecords,

    #[error("invalid parameter: {detail}")]
    InvalidParameter { detail: String },

    #[error("bad format: {detail}")]
    BadFormat { detail: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl TextError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        TextError::Io {
            path: path.into(),
            source,
        }
    }
}
