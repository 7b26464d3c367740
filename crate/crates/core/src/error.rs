use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: shape mismatch: {detail}")]
    Shape { op: &'static str, detail: String },

    #[error("line {line}: field `{field}`: {msg}")]
    Parse { line: usize, field: String, msg: String },

    #[error("clip {clip_id}: {msg}")]
    InvalidClip { clip_id: String, msg: String },

    #[error("token `{0}` is not in the vocabulary")]
    OutOfVocabulary(String),

    #[error("{what}: length mismatch ({left} vs {right})")]
    LengthMismatch { what: &'static str, left: usize, right: usize },

    #[error("no neutral clip for sentence {0}")]
    NoNeutralReference(usize),

    #[error("{0}: empty input")]
    Empty(&'static str),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("non-finite gradient in parameter `{0}`")]
    NonFiniteGradient(String),

    #[error("non-finite loss at epoch {epoch}, step {step}")]
    NonFiniteLoss { epoch: usize, step: usize },

    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("not a checkpoint file (bad magic)")]
    BadMagic,
    #[error("checkpoint format version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("checkpoint truncated")]
    Truncated,
    #[error("checkpoint checksum mismatch (stored {stored:#010x}, computed {computed:#010x})")]
    Checksum { stored: u32, computed: u32 },
    #[error("malformed checkpoint: {0}")]
    Malformed(String),
}
