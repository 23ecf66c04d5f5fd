use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// The variants split along the lines the CLI maps onto exit codes: bad
/// inputs and configuration on one side, numerical breakdown on the other.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("calibration file, row {row}: {message}")]
    Calibration { row: usize, message: String },

    #[error("metric collapsed: largest |eigenvalue| of the metric is {0:e}")]
    MetricCollapsed(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("measurement of entry ({row}, {col}) term {term}: {source}")]
    Measurement {
        row: usize,
        col: usize,
        term: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::MetricCollapsed(_) | Error::Numerical(_) => true,
            Error::Measurement { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
