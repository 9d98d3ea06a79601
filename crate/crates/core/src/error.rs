use thiserror::Error;

use crate::sampler::ExplosionReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A potential (or its gradient) produced a non-finite value.
    #[error("non-finite {what} at component {component}")]
    Evaluation { what: &'static str, component: usize },

    /// A scheme/potential/run parameter violates a precondition.
    #[error("configuration error: {0}")]
    Config(String),

    /// The integrand handed to a quadrature oracle does not decay.
    #[error("integrability error: {0}")]
    Integrability(String),

    #[error("all {} chains exploded before burn-in ended", .0.n_chains)]
    AllExploded(Box<ExplosionReport>),

    #[error("no samples left after excluding exploded chains")]
    EmptyReport,

    #[error("binning error: {0}")]
    Binning(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
