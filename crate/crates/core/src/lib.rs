//! Exact performance metrics for the directed FCFS infinite bipartite
//! matching model, together with an independent Monte Carlo simulator of
//! the same model.
//!
//! Agents of types `c_1..c_I` and goods of types `s_1..s_J` arrive as one
//! i.i.d. sequence. Each arriving good is matched to the earliest unmatched
//! compatible agent, or lost when there is none. The crate computes:
//!
//!  - structural diagnostics: stability, complete resource pooling and the
//!    maximal stable traffic intensity ([`model`]);
//!  - the normalizing constant, first-appearance stationary probabilities and
//!    the matching and loss rates, all from a single depth-first pass over
//!    ordered subsets of agent types ([`analytic`]);
//!  - delay and waiting-time moments, generating functions and moment
//!    generating functions ([`delays`]);
//!  - light-traffic limits, traffic-intensity sweeps and the dedicated M/M/1
//!    baseline ([`limits`]);
//!  - a seeded simulator with batch-means standard errors, detailed-state
//!    tracking and the exchange transformation ([`simulator`]).
//!
//! The crate is `no_std` and only needs an allocator. File formats, the CLI
//! and parallel evaluation live in the companion `fcfs-match` crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analytic;
pub mod delays;
pub mod error;
pub mod limits;
pub mod model;
pub mod pairs;
pub mod simulator;
pub mod sum;

pub(crate) mod math;

pub use analytic::{
    analyze, enumerate_terms, matching_rates, normalizing_constant, pi_y_perm, Analysis,
    EnumerationOptions, PermutationTerm, RateReport,
};
pub use delays::{delay_moments, delay_pgf, geometric_stage, wait_mgf, wait_moments, DelayReport};
pub use error::{AnalyticError, ModelError, SimError, ValidationErrors};
pub use model::{AgentSet, GoodSet, MatchingModel, ModelSpec};
pub use pairs::PairMap;
