use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// A single violated model invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{side} frequencies sum to {sum}, expected 1")]
    FrequencySumError { side: Side, sum: f64 },
    #[error("{side} type `{name}` has non-positive frequency {value}")]
    NonPositiveFrequency {
        side: Side,
        name: String,
        value: f64,
    },
    #[error("unknown {side} identifier `{name}`")]
    UnknownIdentifier { side: Side, name: String },
    #[error("duplicate {side} identifier `{name}`")]
    DuplicateIdentifier { side: Side, name: String },
    #[error("agent type `{name}` has no compatible good type")]
    IsolatedAgentType { name: String },
    #[error("{which} must be positive and finite, got {value}")]
    NonPositiveRate { which: &'static str, value: f64 },
    #[error("model declares {count} {side} types, at most {max} are supported")]
    TooManyTypes {
        side: Side,
        count: usize,
        max: usize,
    },
    #[error("{side} type index {index} is out of range")]
    IndexOutOfRange { side: Side, index: usize },
    #[error("agent type `{name}` appears more than once in the ordering")]
    DuplicateType { name: String },
    #[error("`{good}` and `{agent}` are not compatible")]
    NotAnEdge { good: String, agent: String },
}

/// Which side of the bipartite system an identifier belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Agent,
    Good,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Agent => "agent",
            Side::Good => "good",
        })
    }
}

/// Every invariant violated by a candidate model.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationErrors(pub Vec<ModelError>);

impl ValidationErrors {
    pub fn errors(&self) -> &[ModelError] {
        &self.0
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid model ({} problem", self.0.len())?;
        if self.0.len() != 1 {
            f.write_str("s")?;
        }
        f.write_str(")")?;
        for err in &self.0 {
            write!(f, "; {err}")?;
        }
        Ok(())
    }
}

impl core::error::Error for ValidationErrors {}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    /// Some prefix of agent types has no spare good capacity, or so little
    /// that the stationary weights blow up.
    #[error("model is unstable: agent set {prefix:?} has normalized spare capacity {margin}")]
    UnstableModel { prefix: Vec<String>, margin: f64 },
    #[error("{types} agent types exceed the enumeration cap of {cap}")]
    TooManyTypes { types: usize, cap: usize },
    #[error("pair ({good}, {agent}) has zero matching rate")]
    ZeroRate { good: String, agent: String },
    #[error("argument {value} outside the domain {domain}")]
    DomainError { value: f64, domain: String },
    #[error("traffic intensity grid is invalid: {0}")]
    InvalidGrid(String),
    #[error("traffic intensity {rho} is not stable for this model")]
    UnstableGridPoint { rho: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("burn-in {burn_in} must be smaller than the event count {events}")]
    BurnInTooLarge { events: u64, burn_in: u64 },
    #[error("at least 2 batches are needed, got {0}")]
    TooFewBatches(usize),
    #[error("position {requested} lies beyond the certified region ending at {certified}")]
    OpenWindow { requested: usize, certified: usize },
    #[error("simulation statistics have incompatible shapes")]
    ShapeMismatch,
}
