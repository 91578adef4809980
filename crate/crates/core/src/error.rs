use thiserror::Error;

use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable count mismatch: {0} vs {1}")]
    VarMismatch(usize, usize),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("map does not preserve the foliation: {0}")]
    NotFoliated(String),
    #[error("singular matrix")]
    Singular,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("rejected: {}", failed_names(.0))]
    Rejected(Box<Report>),
}

pub type Result<T> = std::result::Result<T, Error>;

fn failed_names(r: &Report) -> String {
    r.failures().map(|c| c.name.as_str()).collect::<Vec<_>>().join(", ")
}
