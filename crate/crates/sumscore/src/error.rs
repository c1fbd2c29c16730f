use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One invalid cell of a response sheet, located by respondent and item id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseViolation {
    pub respondent: String,
    pub item: String,
    pub message: String,
}

impl fmt::Display for ResponseViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "respondent `{}`, item `{}`: {}",
            self.respondent, self.item, self.message
        )
    }
}

fn violations_summary(violations: &[ResponseViolation]) -> String {
    match violations.first() {
        Some(first) => format!("{} invalid answer(s); first: {}", violations.len(), first),
        None => "no violations recorded".to_string(),
    }
}

fn schema_summary(missing: &[String], unexpected: &[String], duplicated: &[String]) -> String {
    format!(
        "missing {:?}, unexpected {:?}, duplicated {:?}",
        missing, unexpected, duplicated
    )
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("likert scale length must be at least {min}, got {k}")]
    ScaleTooShort { k: u32, min: u32 },

    #[error("dichotomous scale needs high > low, got ({low}, {high})")]
    InvalidDichotomous { low: i64, high: i64 },

    #[error("scale range must satisfy {min} <= k_min <= k_max <= {cap}, got ({k_min}, {k_max})")]
    InvalidScaleRange {
        k_min: u32,
        k_max: u32,
        min: u32,
        cap: u32,
    },

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("response columns do not match design items: {}", schema_summary(missing, unexpected, duplicated))]
    SchemaMismatch {
        missing: Vec<String>,
        unexpected: Vec<String>,
        duplicated: Vec<String>,
    },

    #[error("{}", violations_summary(violations))]
    InvalidResponses { violations: Vec<ResponseViolation> },

    #[error("raw answer {raw} not in dichotomous domain {{{low}, {high}}}")]
    RawOutOfDomain { raw: i64, low: i64, high: i64 },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("invalid design document: {0}")]
    MalformedDesign(String),

    #[error("invalid response sheet: {0}")]
    MalformedResponses(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}
