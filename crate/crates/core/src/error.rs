use thiserror::Error;

/// Failure modes shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on grids, radii, times or inputs was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Picard sub-iteration of one time step stopped contracting.
    #[error("Picard sub-iteration diverged at t = {t}: contraction factor {factor:.3e}")]
    Divergence { t: f64, factor: f64 },

    /// The fixed-point map T failed to contract in the weighted norm.
    #[error("fixed-point iteration failed to contract: {0}")]
    NonContraction(String),

    /// Scattering-profile extraction methods disagree beyond tolerance.
    #[error("scattering-profile extraction failed: {0}")]
    Extraction(String),

    /// A truncated sequence (moment, fit) failed to stabilize.
    #[error("no convergence: {0}")]
    Convergence(String),

    /// Malformed or unreadable user input.
    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
