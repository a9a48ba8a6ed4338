use std::path::PathBuf;

use thiserror::Error;

/// Broad failure class, used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing file: {0}")]
    MissingFile(PathBuf),
    #[error("{file}: malformed row at line {line}: {reason}")]
    MalformedRow {
        file: String,
        line: u64,
        reason: String,
    },
    #[error("duplicate soc code {0}")]
    DuplicateSocCode(String),
    #[error("duplicate skill id {0}")]
    DuplicateSkillId(String),
    #[error("duplicate label for {0}")]
    DuplicateLabel(String),
    #[error("unresolved reference: {0}")]
    UnresolvedReference(String),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("malformed vector line {line}: {reason}")]
    MalformedVectorLine { line: usize, reason: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("isolated nodes: {0:?}")]
    IsolatedNode(Vec<String>),
    #[error("invalid node {0}")]
    InvalidNode(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("empty mask")]
    EmptyMask,
    #[error("non-finite loss at epoch {epoch}: {detail}")]
    NonFiniteLoss { epoch: usize, detail: String },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("empty ensemble")]
    EmptyEnsemble,
    #[error("too few labels: need at least {needed}, have {have}")]
    TooFewLabels { needed: usize, have: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("perplexity {perplexity} too large for {n} points")]
    PerplexityTooLarge { perplexity: f64, n: usize },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) => ErrorClass::Usage,
            Error::NonFiniteLoss { .. } => ErrorClass::Numeric,
            _ => ErrorClass::Data,
        }
    }

    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingFile(_) => "missing_file",
            Error::MalformedRow { .. } => "malformed_row",
            Error::DuplicateSocCode(_) => "duplicate_soc_code",
            Error::DuplicateSkillId(_) => "duplicate_skill_id",
            Error::DuplicateLabel(_) => "duplicate_label",
            Error::UnresolvedReference(_) => "unresolved_reference",
            Error::EmptyCorpus => "empty_corpus",
            Error::MalformedVectorLine { .. } => "malformed_vector_line",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::IsolatedNode(_) => "isolated_node",
            Error::InvalidNode(_) => "invalid_node",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::EmptyMask => "empty_mask",
            Error::NonFiniteLoss { .. } => "non_finite_loss",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::EmptyEnsemble => "empty_ensemble",
            Error::TooFewLabels { .. } => "too_few_labels",
            Error::LengthMismatch(..) => "length_mismatch",
            Error::Empty => "empty",
            Error::PerplexityTooLarge { .. } => "perplexity_too_large",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
