use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// Numerical failures (blow-up, loss of positivity, degenerate fit windows)
/// get their own variants so callers can map them to exit codes without
/// string-matching.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid needs at least {min} intervals, got {got}")]
    GridTooCoarse { got: usize, min: usize },

    #[error("parameter {name} = {value} out of range: need {requirement}")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("field holds {got} nodes but the grid has {expected}")]
    SizeMismatch { got: usize, expected: usize },

    #[error("{name}: {msg}")]
    InvalidArgument { name: &'static str, msg: String },

    #[error("non-finite field value at t = {time}")]
    Instability { time: f64 },

    #[error("cell density materially negative (min = {min:e})")]
    NegativeDensity { min: f64 },

    #[error("field must be strictly positive everywhere (min = {min:e})")]
    NonpositiveField { min: f64 },

    #[error("need at least {need} samples strictly inside the fit window, got {got}")]
    TooFewSamples { got: usize, need: usize },

    #[error("samples are not sorted by time")]
    UnsortedSamples,

    #[error("decay quantity converged below the floating-point floor inside the fit window")]
    BelowFloor,

    #[error("carrying capacity not reached by t = {t_max}; cannot place a fit window")]
    ArrivalNotReached { t_max: f64 },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{path}: {source}")]
    File {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Instability { .. }
                | Error::NegativeDensity { .. }
                | Error::NonpositiveField { .. }
                | Error::BelowFloor
                | Error::ArrivalNotReached { .. }
        )
    }
}
