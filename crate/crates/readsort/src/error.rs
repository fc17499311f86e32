use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed FASTQ record {index}: {reason}")]
    MalformedRecord { index: usize, reason: String },

    #[error("malformed FASTA: {0}")]
    MalformedFasta(String),

    #[error("reference database is empty")]
    EmptyDb,

    #[error("reference sequence is empty")]
    EmptyReference,

    #[error("read sequence is empty")]
    EmptyRead,

    #[error("model ensemble is frozen; training is not allowed")]
    FrozenModel,

    #[error("model ensemble must be frozen before estimation")]
    NotFrozen,

    #[error("invalid sort plan: {0}")]
    InvalidPlan(String),

    #[error("corrupt permutation sidecar: {0}")]
    CorruptSidecar(String),

    #[error("corrupt container: {0}")]
    CorruptContainer(String),

    #[error("external tool not found: {0}")]
    ToolMissing(String),

    #[error("external tool failed ({command}): exit status {status}\n{stderr}")]
    ToolFailed {
        command: String,
        status: i32,
        stderr: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Process exit code for the CLI: 3 for data errors, 4 for external-tool errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ToolMissing(_) | Error::ToolFailed { .. } => 4,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
