use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("array must have at least one element")]
    EmptyArray,

    #[error("element spacing ratio must be positive and finite, got {0}")]
    BadSpacingRatio(f64),

    #[error("angle grid needs at least one point")]
    EmptyGrid,

    #[error("angle {0} rad is outside [0, pi]")]
    AngleOutOfRange(f64),

    #[error("angle must be finite")]
    NonFiniteAngle,

    #[error("Rician K-factor must be nonnegative and finite, got {0}")]
    BadRicianFactor(f64),

    #[error("cluster configuration invalid: {0}")]
    BadClusterConfig(String),

    #[error("at least one user channel is required")]
    NoUsers,

    #[error("pilot energy must be positive and finite, got {0}")]
    BadPilotEnergy(f64),

    #[error("pilot matrix dimension {got} does not match the number of users {expected}")]
    PilotDimensionMismatch { got: usize, expected: usize },

    #[error(
        "equivalent channel is numerically singular (beam collision), \
         condition estimate {cond:.3e}"
    )]
    SingularEquivalentChannel { cond: f64 },

    #[error("matrix is not Hermitian positive definite")]
    NotPositiveDefinite,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("experiment configuration invalid: {0}")]
    InvalidExperiment(String),
}

pub type Result<T> = std::result::Result<T, SimError>;
