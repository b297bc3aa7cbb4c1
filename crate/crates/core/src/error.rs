use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular (det = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("configuration is not admissible: boundary distance {boundary_distance}")]
    InadmissibleConfig { boundary_distance: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("initial configuration does not lie over the path start (offset {offset:e})")]
    BasePointMismatch { offset: f64 },

    #[error("configurations lie in different fibers (base offset {offset:e})")]
    FiberMismatch { offset: f64 },

    #[error("integration produced a non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("collision geometry is degenerate")]
    DegenerateGeometry,

    #[error("invalid path: {0}")]
    InvalidPath(String),
}
