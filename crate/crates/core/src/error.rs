//! Error taxonomy shared by the whole kernel.
//!
//! The variants map onto the CLI exit codes: structural problems are caller
//! mistakes, `Inconclusive` means the truncation window was exhausted,
//! `Certification` means no superficial sequence was found, and `Identity`
//! flags a violated theorem identity (always a bug or a bad certificate).

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed input: mismatched variable counts, singular changes of
    /// coordinates, non-minimal presentations, zero determinants.
    #[error("structural error: {0}")]
    Structural(String),

    /// A query landed outside the certified degree window.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// A stabilization test did not settle inside the largest window.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    /// Superficial-element search exhausted its retry budget.
    #[error("certification failure: {0}")]
    Certification(String),

    /// An identity the theory guarantees failed to hold numerically.
    #[error("identity violation: {0}")]
    Identity(String),
}

impl Error {
    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }
    pub fn truncation(msg: impl Into<String>) -> Self {
        Error::Truncation(msg.into())
    }
    pub fn inconclusive(msg: impl Into<String>) -> Self {
        Error::Inconclusive(msg.into())
    }
    pub fn certification(msg: impl Into<String>) -> Self {
        Error::Certification(msg.into())
    }
    pub fn identity(msg: impl Into<String>) -> Self {
        Error::Identity(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
