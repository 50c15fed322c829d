//! Monte Carlo simulation of directed FCFS matching.
//!
//! Runs are seeded and deterministic. Statistics are collected after a
//! burn-in and split into batches so that standard errors account for the
//! autocorrelation of the chain.

mod detailed;
mod exchange;
mod queue;
mod run;
mod sequence;

pub use detailed::{detailed_state, is_admissible, DetailedTracker, Mark, UItem};
pub use exchange::{
    check_window, exchange_transform, exchange_with, match_forward, match_reversed,
    verify_reversibility, ChiSquare, ExchangeWindow, Outcome, ReversibilityReport,
};
pub use queue::{QueuedAgent, StepEvent, UnmatchedList, YState};
pub use run::{
    default_burn_in, run, BatchCounts, Estimate, SimConfig, SimEstimates, SimStats, Simulation,
    DEFAULT_BATCHES,
};
pub use sequence::{generate_item, Item, ItemSampler};
