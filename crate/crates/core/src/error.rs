use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("operation requires a radial grid")]
    NotRadial,
    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("regime mismatch: {0}")]
    Regime(String),
    #[error("Omega0 is not resolved by the grid: {0}")]
    Unresolved(String),
    #[error("no mountain pass: {0}")]
    NoPass(String),
    #[error("step size underflow in {0}")]
    StepUnderflow(&'static str),
    #[error("singular linear system in {0}")]
    Singular(&'static str),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
