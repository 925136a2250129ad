use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("payload kinds are not comparable: {0}")]
    IncomparablePayloads(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid product: {0}")]
    InvalidProduct(String),

    #[error("invalid semantic network: {0}")]
    InvalidNetwork(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid cost matrix: {0}")]
    InvalidCost(String),

    #[error("originality needs a reference sample")]
    EmptySample,

    #[error("unsupported product distance: {0}")]
    UnsupportedDistance(&'static str),

    #[error("archive has no project.json manifest: {0}")]
    MissingManifest(PathBuf),

    #[error("malformed block graph at block `{id}`: {reason}")]
    MalformedBlocks { id: String, reason: String },

    #[error("unknown asset `{0}` referenced by project.json")]
    UnknownAsset(String),

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("missing features for {}", .0.join(", "))]
    MissingFeatures(Vec<String>),

    #[error("malformed sidecar {digest}: {message}")]
    Sidecar { digest: String, message: String },

    #[error("cannot decode asset {digest}: {message}")]
    Decode { digest: String, message: String },

    #[error("audio too short: {len} samples, window is {window}")]
    AudioTooShort { len: usize, window: usize },

    #[error("invalid training data: {0}")]
    Training(String),

    #[error("kendall's tau is undefined: {0}")]
    UndefinedTau(String),

    #[error("invalid labels: {0}")]
    Labels(String),

    #[error("unknown projects: {}", .0.join(", "))]
    UnknownProjects(Vec<String>),

    #[error("model format: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Zip(#[from] zip::result::ZipError),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
