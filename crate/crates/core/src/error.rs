use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),

    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    Shape {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value in {0} update")]
    PoisonedUpdate(&'static str),

    #[error("non-finite Q-target")]
    PoisonedTarget,

    #[error("training aborted at step {step}: {source}")]
    AtStep {
        step: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("state {0} is terminal")]
    TerminalState(usize),

    #[error("index {index} out of range (len {len})")]
    Index { index: usize, len: usize },

    #[error("replay buffer is empty")]
    EmptyBuffer,

    #[error("batch is empty")]
    EmptyBatch,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("value iteration did not converge after {0} sweeps")]
    Divergence(usize),

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn shape(context: &'static str, expected: usize, actual: usize) -> Self {
        Error::Shape {
            context,
            expected,
            actual,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }

    /// Attaches the training step at which the error surfaced.
    pub fn at_step(self, step: u64) -> Self {
        match self {
            e @ Error::AtStep { .. } => e,
            e => Error::AtStep {
                step,
                source: Box::new(e),
            },
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
