use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge within {nodes} nodes (error estimate {estimate:.3e})")]
    NonConvergence { nodes: usize, estimate: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("antisymmetric pair state has zero norm (overlap N = 1)")]
    DegenerateState,

    #[error("malformed trajectory: {0}")]
    MalformedTrajectory(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
