use thiserror::Error;

use crate::phase::PhaseLabel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid flux parameters: {0}")]
    InvalidPhi(String),
    #[error("value {value} is outside the range of the {branch:?} branch")]
    OutOfBranchRange { branch: PhaseLabel, value: f64 },
    #[error("Riemann state {0} lies in the unstable phase")]
    NotTwoPhaseData(f64),
    #[error("grid needs at least 5 points, got {0}")]
    GridTooSmall(usize),
    #[error("diffusivity must be positive, got {0}")]
    NonPositiveDiffusivity(f64),
    #[error("data does not admit a steady interface")]
    NotSteadyData,
    #[error("moving interface requires equal slopes (m- = {0}, m+ = {1})")]
    UnequalSlopes(f64, f64),
    #[error("data admits a steady interface")]
    SteadyData,
    #[error("no sign change of the interface equation on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("eigensolver did not converge after {0} iterations")]
    ConvergenceFailure(usize),
    #[error("initial vector is not a transition configuration: {0}")]
    NotTransitionConfiguration(String),
    #[error("index {index} outside [{lo}, {hi}]")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },
    #[error("CFL violated: 4 dt / h^2 = {0}")]
    CflViolation(f64),
    #[error("singular regime system (pivot {pivot} at row {row})")]
    SingularSystem { row: usize, pivot: f64 },
    #[error("no interface: one phase is absent")]
    NoInterface,
    #[error("interface index {0} reached the boundary")]
    InterfaceAtBoundary(i64),
    #[error("interface index jumped from {from} to {to} in one step")]
    InterfaceJumpTooLarge { from: usize, to: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure(_)
                | Error::CflViolation(_)
                | Error::SingularSystem { .. }
                | Error::BracketFailure { .. }
                | Error::InterfaceAtBoundary(_)
                | Error::InterfaceJumpTooLarge { .. }
                | Error::NoInterface
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
