use thiserror::Error;

/// Errors raised by the belief-space simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("population must contain at least one agent")]
    EmptyPopulation,
    #[error("edge probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: &'static str },
    #[error("agent id {0} does not exist")]
    InvalidAgent(usize),
    #[error("need at least {needed} regular agents, found {found}")]
    TooFewAgents { needed: usize, found: usize },
    #[error("herd direction is undefined (zero mean velocity)")]
    ZeroHerdDirection,
    #[error("an injection was already applied at step {0}")]
    DuplicateInjection(u64),
    #[error("injection scheduled for step {expected} but state is at step {actual}")]
    InjectionStepMismatch { expected: u64, actual: u64 },
}

impl SimError {
    pub(crate) fn param(field: &'static str, reason: &'static str) -> Self {
        SimError::InvalidParam { field, reason }
    }
}
