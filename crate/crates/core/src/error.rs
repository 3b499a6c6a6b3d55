use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by parameter validation and by the estimators.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter is outside its admissible range.
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    /// A grid or grid function is malformed.
    InvalidGrid(&'static str),
    /// Density data is negative, non-finite, or carries no mass.
    InvalidDensity(&'static str),
    /// A live particle was found outside the computational domain.
    ParticleOutsideDomain { id: u64, position: [f64; 2] },
    /// The flux estimator needs `eps > 0` in every cell.
    ZeroScaling { cell: usize },
    /// An explicit solver was asked to run with an unstable time step.
    Unstable { dt: f64, limit: f64, constraint: &'static str },
    /// Two grid functions are defined on different meshes.
    GridMismatch,
    /// The requested combination is not supported.
    Unsupported(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value, reason } => {
                write!(f, "invalid parameter `{name}` = {value}: {reason}")
            }
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::InvalidDensity(msg) => write!(f, "invalid density: {msg}"),
            Error::ParticleOutsideDomain { id, position } => write!(
                f,
                "particle {id} at ({}, {}) lies outside the domain",
                position[0], position[1]
            ),
            Error::ZeroScaling { cell } => {
                write!(f, "flux undefined: eps = 0 in cell {cell}")
            }
            Error::Unstable { dt, limit, constraint } => {
                write!(f, "time step {dt} exceeds the {constraint} limit {limit}")
            }
            Error::GridMismatch => f.write_str("grid functions live on different meshes"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn require(cond: bool, name: &'static str, value: f64, reason: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason })
    }
}
