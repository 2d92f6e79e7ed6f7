use core::fmt;

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible domain.
    Domain {
        /// Parameter name.
        what: &'static str,
        /// Offending value.
        value: f64,
    },
    /// The requested bandwidth/nonlinearity combination has no bound.
    UnsupportedRegime,
    /// Inputs that must agree do not (path length vs fiber length, grid sizes).
    Inconsistent(&'static str),
    /// A root search found no sign change on its bracket.
    NoBracket(&'static str),
    /// A configuration value could not be parsed.
    Parse(&'static str),
    /// A required optional parameter was not supplied.
    Missing(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value:e}"),
            Error::UnsupportedRegime => {
                f.write_str("no bound available in this bandwidth and nonlinearity regime")
            }
            Error::Inconsistent(what) => write!(f, "inconsistent inputs: {what}"),
            Error::NoBracket(what) => write!(f, "no sign change while solving for {what}"),
            Error::Parse(what) => write!(f, "cannot parse {what}"),
            Error::Missing(what) => write!(f, "missing parameter: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
