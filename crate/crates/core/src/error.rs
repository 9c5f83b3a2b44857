use thiserror::Error;

/// Errors raised by the calculators. Expected negative answers (an
/// infeasible superposition, a failing sweep) are values, not errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed rule or parameter combination.
    #[error("configuration error: {0}")]
    Config(String),

    /// Textual input that does not match the grammar; `column` is 1-based.
    #[error("parse error at column {column}: {message}\n  {input}\n  {marker}^")]
    Parse {
        input: String,
        column: usize,
        marker: String,
        message: String,
    },

    /// A requested bound reaches past the window on which the data is exact.
    #[error("horizon exhausted: needed {needed}, window covers {available}")]
    HorizonExhausted { needed: u64, available: u64 },

    /// An enumeration or grid would exceed its configured cap.
    #[error("cap exceeded for {what}: {requested} > {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The greedy point builder could not place `word` with any spacer up to `max_spacer`.
    #[error("spacer exhausted placing word {word} (tried spacers 0..={max_spacer})")]
    SpacerExhausted { word: String, max_spacer: u64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(input: &str, pos: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            column: pos + 1,
            marker: " ".repeat(pos),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
