use std::fmt;

use laxforge_core::Error as CoreError;

/// Failure classes of the exit-code contract.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, config files or inputs (exit 2).
    Usage(String),
    /// One or more identities failed (exit 1).
    Verification(Vec<String>),
    /// The numerics broke down: collision, divergence, no convergence (exit 3).
    Numerical(String),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Verification(names) => write!(f, "verification failed: {}", names.join(", ")),
            CliError::Numerical(m) => write!(f, "numerical breakdown: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        use CoreError::*;
        let msg = e.to_string();
        match e {
            ParticleCollision { .. }
            | NoAdmissibleMomenta { .. }
            | CollisionEncountered { .. }
            | StepUnderflow { .. }
            | TransportUnderflow { .. }
            | HmContinuationFailed { .. }
            | DegenerateState { .. }
            | AtPole { .. }
            | GaugeVanishes { .. }
            | DivisionByZeroPolynomial => CliError::Numerical(msg),
            BdNotPolynomial { .. } => CliError::Verification(vec![format!("bd_polynomial ({msg})")]),
            PolynomialityViolated { .. } => CliError::Verification(vec![format!("polynomiality ({msg})")]),
            DegreeBound { .. } => CliError::Verification(vec![format!("degree_audit ({msg})")]),
            _ => CliError::Usage(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
