use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator index {index} out of range 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("word uses generator {generator} but the representation has only {rank} generators")]
    AlphabetMismatch { generator: usize, rank: usize },

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("bilinear form is not coadjoint-invariant (residual {residual:.3e})")]
    NotInvariant { residual: f64 },

    #[error("{0}")]
    InvalidInput(String),

    #[error("Newton projection did not converge after {restarts} restarts (last residual {residual:.3e})")]
    SamplingFailed { restarts: usize, residual: f64 },

    #[error("chain is not a cycle (boundary norm {residual:.3e})")]
    NotACycle { residual: f64 },

    #[error("cochain is not a cocycle (coboundary norm {residual:.3e})")]
    NotACocycle { residual: f64 },

    #[error("representation is not in Hom_xi (relator residual {residual:.3e})")]
    NotMember { residual: f64 },

    #[error("pairing Gram matrix is singular within a nondegenerate component (smallest/largest singular value {ratio:.3e})")]
    SingularPairing { ratio: f64 },

    #[error("trajectory reached a stratum boundary at t = {time}: {reason}")]
    StratumBoundary { time: f64, reason: String },

    #[error("automorphism does not preserve the relator up to conjugation")]
    RelatorNotPreserved,

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("corrupted file: {0}")]
    Corrupted(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
