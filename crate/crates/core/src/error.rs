use std::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its mathematical domain.
    Domain(String),
    /// The requested quantity needs a finite mean trapping time.
    InfiniteMean,
    /// A requested horizon exceeds the configured memory/time budget.
    HorizonTooLarge { requested: usize, limit: usize },
    /// Malformed distribution spec or config text; `pos` is a byte offset.
    Parse { pos: usize, msg: String },
    /// Structurally valid input describing an invalid distribution.
    Validation(String),
    /// Invalid fit window.
    Window(String),
    /// The local refinement ended up worse than the grid optimum.
    FitDiverged,
    /// `linear_bounds` is undefined when p(0) = 0.
    ZeroEscape,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::InfiniteMean => write!(f, "trapping time has infinite mean"),
            Error::HorizonTooLarge { requested, limit } => {
                write!(f, "horizon {requested} exceeds budget {limit}")
            }
            Error::Parse { pos, msg } => write!(f, "parse error at byte {pos}: {msg}"),
            Error::Validation(msg) => write!(f, "invalid distribution: {msg}"),
            Error::Window(msg) => write!(f, "invalid fit window: {msg}"),
            Error::FitDiverged => write!(f, "fit refinement diverged"),
            Error::ZeroEscape => write!(f, "p(0) = 0: bound constant is undefined"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
