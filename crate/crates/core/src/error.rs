use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("dense intermediate of {entries} entries exceeds the cap of {cap}")]
    DimensionCap { entries: u128, cap: u128 },

    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("confirmor index {index} out of range for k = {k}")]
    ConfirmorIndex { index: usize, k: usize },

    #[error("index {index} out of range [1, {max}]")]
    IndexRange { index: usize, max: usize },

    #[error("level {level} out of range [1, {k}]")]
    LevelRange { level: usize, k: usize },

    #[error("tolerance gamma = {gamma} out of range [0, {max}]")]
    GammaRange { gamma: usize, max: usize },

    #[error("systems are not (approximately) synchronous with respect to the given state set")]
    NotSynchronous,

    #[error("pinning is infeasible: {0}")]
    Infeasible(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
