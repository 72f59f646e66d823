use thiserror::Error;

#[derive(Debug, Error)]
pub enum FastError {
    #[error("dimension mismatch: expected {expected} qubits, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("observables {first} and {second} do not commute")]
    NonCommuting { first: String, second: String },

    #[error("degenerate ancilla branch (probability {probability:e})")]
    DegenerateBranch { probability: f64 },

    #[error("unreliable link in {chain} chain at position {position}: pair product {value:.3e}")]
    UnreliableLink {
        chain: &'static str,
        position: usize,
        value: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FastError>;

pub(crate) fn check_qubits(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(FastError::Dimension { expected, found });
    }
    Ok(())
}
