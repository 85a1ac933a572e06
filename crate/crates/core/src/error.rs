use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("coefficient floor violated: {0}")]
    CoefficientFloor(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("operator invariant violated: {0}")]
    Invariant(String),

    #[error("numerical failure in {what} (residual {residual:e})")]
    Numerical { what: String, residual: f64 },

    #[error("eigenvalue {eigenvalue} lies on the contour |z - {center}| = {radius}")]
    ContourCollision { center: f64, radius: f64, eigenvalue: f64 },

    #[error("contour quadrature disagrees with the eigenprojector by {0:e}")]
    QuadratureResolution(f64),

    #[error("argument outside the admissible domain: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("vector not in the fast subspace: slow component {0:e}")]
    Projection(f64),

    #[error("non-hyperbolic equilibrium at {value} (margin {margin:e})")]
    Hyperbolicity { value: f64, margin: f64 },

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { what: String, iterations: usize, residual: f64 },

    #[error("solution blew up: {0}")]
    Blowup(String),

    #[error("reduced coordinate {value} outside the section range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },

    #[error("insufficient data: {usable} usable rows, need at least {needed}")]
    InsufficientData { usable: usize, needed: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("sweep failed at eps = {eps}: {source}")]
    Sweep {
        eps: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
