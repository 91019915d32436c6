use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The classical kernels blow up at zero separation.
    #[error("singular at the origin: {0}")]
    Singularity(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("assembly failed: {0}")]
    Assembly(String),

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("shape mismatch: expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("no translational orientation: smallest singular value of C is {sigma_min:e}, threshold {threshold:e}")]
    NoTranslationalOrientation { sigma_min: f64, threshold: f64 },

    #[error("eigen-solver failure: {0}")]
    Eigen(String),
}

impl Error {
    /// Short stable identifier, used by the command-line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Singularity(_) => "singularity",
            Error::InvalidConfiguration(_) => "invalid-configuration",
            Error::Assembly(_) => "assembly",
            Error::SingularSystem(_) => "singular-system",
            Error::ShapeMismatch { .. } => "shape-mismatch",
            Error::NoTranslationalOrientation { .. } => "no-translational-orientation",
            Error::Eigen(_) => "eigen",
        }
    }

    /// Whether the error stems from bad user input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::Singularity(_)
                | Error::InvalidConfiguration(_)
                | Error::ShapeMismatch { .. }
        )
    }
}
