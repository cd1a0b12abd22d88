use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid carrier: {0}")]
    InvalidCarrier(String),
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("point {0} lies outside the carrier")]
    PointOutside(String),
    #[error("invalid near map: {0}")]
    InvalidMap(String),
    #[error("carriers do not match")]
    CarrierMismatch,
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("malformed json: {0}")]
    Json(String),
    #[error("map is not closely bijective")]
    NotCloselyBijective,
    #[error("map is neither closely injective nor closely surjective")]
    IndexUndefined,
    #[error("map has infinite support")]
    InfiniteSupport,
    #[error("not a permutation: {0}")]
    NotPermutation(String),
    #[error("subset is not commensurated: {0}")]
    NotCommensurated(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not a graded atlas: {0}")]
    Atlas(String),
    #[error("corner graph: {0}")]
    CornerGraph(String),
    #[error("window exhausted at radius {radius}: {reason}")]
    WindowExhausted { radius: i64, reason: String },
    #[error("not conjugate: {0}")]
    NotConjugate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent input.
    Validation,
    /// Well-formed input on which the requested computation cannot succeed.
    Obstruction,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidCarrier(_)
            | Error::UnknownCell(_)
            | Error::PointOutside(_)
            | Error::InvalidMap(_)
            | Error::CarrierMismatch
            | Error::InvalidAction(_)
            | Error::InvalidInput(_)
            | Error::Json(_) => ErrorKind::Validation,
            _ => ErrorKind::Obstruction,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidCarrier(_) => "invalid_carrier",
            Error::UnknownCell(_) => "unknown_cell",
            Error::PointOutside(_) => "point_outside",
            Error::InvalidMap(_) => "invalid_map",
            Error::CarrierMismatch => "carrier_mismatch",
            Error::InvalidAction(_) => "invalid_action",
            Error::InvalidInput(_) => "invalid_input",
            Error::Json(_) => "malformed_json",
            Error::NotCloselyBijective => "not_closely_bijective",
            Error::IndexUndefined => "index_undefined",
            Error::InfiniteSupport => "infinite_support",
            Error::NotPermutation(_) => "not_permutation",
            Error::NotCommensurated(_) => "not_commensurated",
            Error::Unsupported(_) => "unsupported",
            Error::Atlas(_) => "not_graded_atlas",
            Error::CornerGraph(_) => "corner_graph",
            Error::WindowExhausted { .. } => "window_exhausted",
            Error::NotConjugate(_) => "not_conjugate",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
