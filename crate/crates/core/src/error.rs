use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    InvalidArgument(String),
    /// A division or embedding would discard every known digit.
    PrecisionLoss(String),
    /// Every coefficient is indistinguishable from zero at the working precision.
    PrecisionInsufficient(String),
    /// The truncation degree is too small for the requested operation.
    TruncationInsufficient(String),
    BadReduction { ell: u64 },
    /// The input is outside the supersingular `a_p = 0` setting.
    UnsupportedHypothesis(String),
    /// Hecke eigenspace did not cut down to dimension one.
    IsolationFailure { dimension: usize },
    Resource(String),
    NotPseudoNull(String),
    UnsupportedShape(String),
    CommonFactor(String),
    Inconclusive(String),
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::PrecisionLoss(m) => write!(f, "precision loss: {m}"),
            Error::PrecisionInsufficient(m) => write!(f, "precision insufficient: {m}"),
            Error::TruncationInsufficient(m) => write!(f, "truncation insufficient: {m}"),
            Error::BadReduction { ell } => write!(f, "bad reduction at {ell}"),
            Error::UnsupportedHypothesis(m) => write!(f, "unsupported hypothesis: {m}"),
            Error::IsolationFailure { dimension } => {
                write!(f, "eigenspace isolation failed (dimension {dimension})")
            }
            Error::Resource(m) => write!(f, "resource limit: {m}"),
            Error::NotPseudoNull(m) => write!(f, "not pseudo-null: {m}"),
            Error::UnsupportedShape(m) => write!(f, "unsupported shape: {m}"),
            Error::CommonFactor(m) => write!(f, "common factor within precision: {m}"),
            Error::Inconclusive(m) => write!(f, "inconclusive: {m}"),
            Error::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
