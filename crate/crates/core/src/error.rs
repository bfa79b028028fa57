use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// The variants split into two groups that the command line maps to
/// different exit codes: bad input (parse, parameter, format, precondition,
/// I/O) and numerical trouble (domain, coverage, windowing, tracing,
/// non-convergence). See [`Error::is_numerical`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what}, line {line}: {msg}")]
    Format {
        what: &'static str,
        line: usize,
        msg: String,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("point ({x}, {y}) is outside the domain of the {family} family")]
    Domain { family: &'static str, x: f64, y: f64 },

    #[error("backprojection needs lambda={lambda} at x=({x}, {y}), phi={phi}, outside the filtered lambda range")]
    Coverage { x: f64, y: f64, phi: f64, lambda: f64 },

    #[error("sinogram row {row} does not vanish at the lambda window edge (|edge|/max = {ratio:e}); widen the lambda range")]
    Windowing { row: usize, ratio: f64 },

    #[error("curve tracing failed at lambda={lambda}, phi={phi}: {msg}")]
    Trace { lambda: f64, phi: f64, msg: String },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::Coverage { .. }
                | Error::Windowing { .. }
                | Error::Trace { .. }
                | Error::Numerical(_)
        )
    }

    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
