use crate::geometry::Point2;

/// Errors raised across the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "degenerate hull: all points lie within tolerance of the line through {a:?} and {b:?}"
    )]
    DegenerateHull { a: Point2, b: Point2 },

    #[error("empty region")]
    EmptyRegion,

    #[error("raster of {cells} cells exceeds the budget of {budget} cells")]
    ResourceLimit { cells: usize, budget: usize },

    #[error("loop vertex {index} lies {distance:e} outside the hull")]
    InconsistentHull { index: usize, distance: f64 },

    #[error(
        "initial polygon rasterizes to area {area:.6} which is below the required {required:.6}; \
         increase init_inflation"
    )]
    InitFailure { area: f64, required: f64 },

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
