use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("UNIMPUTABLE: need at least 2 present values, found {present}")]
    Unimputable { present: usize },

    #[error("SERIES_TOO_SHORT: need at least {needed} months, got {len}")]
    SeriesTooShort { len: usize, needed: usize },

    #[error("DEGENERATE_SCALE: {0}")]
    DegenerateScale(&'static str),

    #[error("SPLIT_EMPTY: {len} months at train fraction {fraction} leaves an empty side")]
    SplitEmpty { len: usize, fraction: f64 },

    #[error("INSUFFICIENT_HISTORY: {len} values cannot feed a lookback of {lookback}")]
    InsufficientHistory { len: usize, lookback: usize },

    #[error("INSUFFICIENT_DATA: {0}")]
    InsufficientData(String),

    #[error("ALIGNMENT_ERROR: {0}")]
    Alignment(String),

    #[error("NUMERIC_OVERFLOW: non-finite value in {0}")]
    NumericOverflow(&'static str),

    #[error("INVALID_HORIZON: horizon must be >= 1, got {0}")]
    InvalidHorizon(usize),

    #[error("SHAPE_ERROR: lengths {0} and {1} differ")]
    Shape(usize, usize),

    #[error("EMPTY_INPUT")]
    EmptyInput,

    #[error("MAPE_UNDEFINED: actual value {value} at index {index} is not strictly positive")]
    MapeUndefined { index: usize, value: f64 },

    #[error("INVALID_MAPE: {0}")]
    InvalidMape(f64),

    #[error("SURROGATE_SINGULAR: kernel matrix not positive definite after jitter")]
    SurrogateSingular,

    #[error("NO_VALID_TRIAL: every objective evaluation failed")]
    NoValidTrial,

    #[error("INVALID_SERIES: {0}")]
    InvalidSeries(String),

    #[error("INVALID_CONFIG: {0}")]
    InvalidConfig(String),

    #[error("PARSE_ERROR: line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("IO_ERROR: {0}")]
    Io(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{city}/{kpi}: {source}")]
    Series {
        city: String,
        kpi: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Upper-case code of the innermost error, e.g. `SERIES_TOO_SHORT`.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Unimputable { .. } => "UNIMPUTABLE",
            Error::SeriesTooShort { .. } => "SERIES_TOO_SHORT",
            Error::DegenerateScale(_) => "DEGENERATE_SCALE",
            Error::SplitEmpty { .. } => "SPLIT_EMPTY",
            Error::InsufficientHistory { .. } => "INSUFFICIENT_HISTORY",
            Error::InsufficientData(_) => "INSUFFICIENT_DATA",
            Error::Alignment(_) => "ALIGNMENT_ERROR",
            Error::NumericOverflow(_) => "NUMERIC_OVERFLOW",
            Error::InvalidHorizon(_) => "INVALID_HORIZON",
            Error::Shape(..) => "SHAPE_ERROR",
            Error::EmptyInput => "EMPTY_INPUT",
            Error::MapeUndefined { .. } => "MAPE_UNDEFINED",
            Error::InvalidMape(_) => "INVALID_MAPE",
            Error::SurrogateSingular => "SURROGATE_SINGULAR",
            Error::NoValidTrial => "NO_VALID_TRIAL",
            Error::InvalidSeries(_) => "INVALID_SERIES",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::Io(_) => "IO_ERROR",
            Error::Stage { source, .. } | Error::Series { source, .. } => source.code(),
        }
    }

    /// Stage label of the outermost [`Error::Stage`] wrapper, if any.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            Error::Series { source, .. } => source.stage(),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
        Error::Parse {
            line,
            message: e.to_string(),
        }
    }
}
