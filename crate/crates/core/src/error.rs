use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("dimension mismatch: expected {expected} coordinates, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),
    #[error("resonance: drive frequency {omega} too close to mode {mode} with frequency {nu}")]
    Resonance { mode: usize, omega: f64, nu: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("step size: {0}")]
    StepSize(String),
    #[error("root bracketing failed: {0}")]
    Bracket(String),
    #[error("inadmissible parameters: {0}")]
    Admissibility(String),
}

impl Error {
    /// Stable machine-readable class name.
    pub fn class(&self) -> &'static str {
        match self {
            Error::InvalidScenario(_) => "invalid-scenario",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::Contract(_) => "contract-violation",
            Error::NoEquilibrium(_) => "no-equilibrium",
            Error::Resonance { .. } => "resonance",
            Error::Domain(_) => "domain",
            Error::Singular(_) => "singular-system",
            Error::StepSize(_) => "step-size",
            Error::Bracket(_) => "bracket",
            Error::Admissibility(_) => "inadmissible",
        }
    }

    /// True for failures of the mathematics (as opposed to malformed input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoEquilibrium(_)
                | Error::Resonance { .. }
                | Error::Domain(_)
                | Error::Singular(_)
                | Error::Bracket(_)
                | Error::Admissibility(_)
        )
    }
}
