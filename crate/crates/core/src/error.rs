use thiserror::Error;

/// Errors raised by the laboratory.
///
/// `Input` covers malformed or out-of-contract arguments supplied by the
/// caller, `Contract` covers a callee (rule, oracle, completion) breaking the
/// contract it was handed, and `Precondition` is reserved for checks whose
/// hypothesis does not hold (e.g. no view isomorphism exists). `Budget` is
/// returned by exhaustive searches that give up before deciding.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("contract error: {0}")]
    Contract(String),
    #[error("precondition unmet: {0}")]
    Precondition(String),
    #[error("search budget exhausted: {0}")]
    Budget(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
