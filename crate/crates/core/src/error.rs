use thiserror::Error;

/// Errors raised by the solver, the control layer and the scenario runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state {state:?} lies outside the model domain")]
    DomainViolation { state: Vec<f64> },

    #[error("strict hyperbolicity lost at {state:?}: {reason}")]
    NotHyperbolic { state: Vec<f64>, reason: String },

    #[error("state {state:?} lies outside the Riemann-coordinate chart")]
    ChartDomain { state: Vec<f64> },

    #[error("family-{family} wave curve left the domain at sigma = {sigma}")]
    CurveExit { family: usize, sigma: f64 },

    #[error("jump of size {size} exceeds the admissible radius {radius}")]
    RadiusExceeded { size: f64, radius: f64 },

    #[error("{what}: Newton iteration did not converge (residual {residual:e} after {iterations} iterations)")]
    NewtonDiverged {
        what: &'static str,
        residual: f64,
        iterations: usize,
    },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("boundary contract violated: {0}")]
    Contract(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("event budget exhausted after {0} events")]
    EventBudget(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status used by the scenario runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Precondition(_) => 2,
            Error::Invariant(_) | Error::Contract(_) => 4,
            Error::Io(_) => 1,
            _ => 3,
        }
    }

    pub(crate) fn domain(u: &nalgebra::DVector<f64>) -> Self {
        Error::DomainViolation {
            state: u.iter().copied().collect(),
        }
    }
}
