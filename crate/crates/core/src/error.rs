use thiserror::Error;

/// Errors raised anywhere in the verification pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero polynomial")]
    DivisionByZeroPolynomial,

    #[error("stencil out of range at (t index {it}, x index {ix})")]
    StencilOutOfRange { it: usize, ix: usize },

    #[error("non-uniform stencil spacing at (t index {it}, x index {ix})")]
    NonUniformStencil { it: usize, ix: usize },

    #[error("no samples")]
    NoSamples,

    #[error("empty residual domain ({skipped} points skipped near poles)")]
    EmptyResidualDomain { skipped: usize },

    #[error("gauge choice vanishes at (t={t}, x={x})")]
    GaugeVanishes { t: f64, x: f64 },

    #[error("particle collision: |Q_{i} - Q_{j}| = {distance:e}")]
    ParticleCollision { i: usize, j: usize, distance: f64 },

    #[error("no admissible momenta found (final residual {residual:e})")]
    NoAdmissibleMomenta { residual: f64 },

    #[error("collision encountered at t={t}")]
    CollisionEncountered { t: f64 },

    #[error("step size underflow at t={t}")]
    StepUnderflow { t: f64 },

    #[error("B_d not polynomial (relative pole content {relative:e})")]
    BdNotPolynomial { relative: f64 },

    #[error("polynomiality violated for {entry} (relative remainder {relative:e})")]
    PolynomialityViolated { entry: &'static str, relative: f64 },

    #[error("degree bound violated for {entry}: degree {degree:?} violates bound {bound}")]
    DegreeBound { entry: &'static str, degree: Option<usize>, bound: usize },

    #[error("transport step underflow near (t={t}, x={x})")]
    TransportUnderflow { t: f64, x: f64 },

    #[error("HM continuation failed at mesh level {level}")]
    HmContinuationFailed { level: usize },

    #[error("degenerate kappa=2 state at t={t}")]
    DegenerateState { t: f64 },

    #[error("evaluation at a pole (t={t}, x={x})")]
    AtPole { t: f64, x: f64 },

    #[error("time {t} outside the available range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("analytic partials unavailable for {0}")]
    PartialsUnavailable(&'static str),

    #[error("expression error: {0}")]
    Expression(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
