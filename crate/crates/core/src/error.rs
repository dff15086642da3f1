use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The elimination kernel refuses matrices with more stored entries than its limit.
    #[error("matrix has {entries} stored entries, above the limit of {limit}")]
    SizeLimit { entries: usize, limit: usize },

    /// An enumeration (V_{k,n}, kernel vectors) would exceed its configured budget.
    #[error("enumeration of {required} items exceeds budget {budget}{}", context.as_deref().map(|c| format!(" ({c})")).unwrap_or_default())]
    EnumerationBudget {
        required: String,
        budget: u64,
        context: Option<String>,
    },

    #[error("subset search budget of {budget} evaluations exhausted; completed sizes {completed_sizes:?}")]
    SearchBudget {
        budget: u64,
        completed_sizes: Vec<usize>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    /// True for the resource-style failures (size limits and budgets).
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::SizeLimit { .. } | Error::EnumerationBudget { .. } | Error::SearchBudget { .. }
        )
    }
}
