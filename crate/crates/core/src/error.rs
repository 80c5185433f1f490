use thiserror::Error;

use crate::mitigate::MitigateError;
use crate::pattern::{ColouringError, PatternError};
use crate::rounds::RoundError;
use crate::sim::SimError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Colouring(#[from] ColouringError),
    #[error(transparent)]
    Round(#[from] RoundError),
    #[error(transparent)]
    Mitigate(#[from] MitigateError),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
