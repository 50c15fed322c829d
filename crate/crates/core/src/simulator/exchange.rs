//! The exchange transformation and reversed-time matching.
//!
//! Swapping every matched agent with its good turns the sequence into another
//! i.i.d. sequence with the same law, and matching that sequence backwards in
//! time (goods take the compatible waiting agent with the highest position)
//! recovers exactly the same pairs.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::queue::{StepEvent, UnmatchedList};
use super::sequence::{Item, ItemSampler};
use crate::error::SimError;
use crate::model::MatchingModel;

/// Fate of one position of a finite window (positions are 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Matched with the item at this position.
    Matched(usize),
    Lost,
    /// An agent still waiting at the end of the window.
    Open,
}

/// Directed FCFS matching of a window from an empty start.
///
/// Also returns the length of the longest prefix after which no agent was
/// waiting.
pub fn match_forward(model: &MatchingModel, items: &[Item]) -> (Vec<Outcome>, usize) {
    let mut outcomes = vec![Outcome::Open; items.len()];
    let mut queue = UnmatchedList::new(model.n_agents());
    let mut settled = 0;
    for (k, &item) in items.iter().enumerate() {
        match queue.step(model, item, k as u64, 0.0) {
            StepEvent::Queued { .. } => {}
            StepEvent::Lost { .. } => outcomes[k] = Outcome::Lost,
            StepEvent::Matched { agent_index, .. } => {
                let a = agent_index as usize;
                outcomes[k] = Outcome::Matched(a);
                outcomes[a] = Outcome::Matched(k);
            }
        }
        if queue.is_empty() {
            settled = k + 1;
        }
    }
    (outcomes, settled)
}

/// Directed FCFS matching run from the last position to the first.
pub fn match_reversed(model: &MatchingModel, items: &[Item]) -> Vec<Outcome> {
    let n = items.len();
    let mut outcomes = vec![Outcome::Open; n];
    let mut queue = UnmatchedList::new(model.n_agents());
    for k in (0..n).rev() {
        // reversed clock: later positions arrive first
        match queue.step(model, items[k], (n - 1 - k) as u64, 0.0) {
            StepEvent::Queued { .. } => {}
            StepEvent::Lost { .. } => outcomes[k] = Outcome::Lost,
            StepEvent::Matched { agent_index, .. } => {
                let a = n - 1 - agent_index as usize;
                outcomes[k] = Outcome::Matched(a);
                outcomes[a] = Outcome::Matched(k);
            }
        }
    }
    outcomes
}

/// Swaps each matched pair; other items stay in place.
pub fn exchange_with(items: &[Item], outcomes: &[Outcome]) -> Vec<Item> {
    items
        .iter()
        .zip(outcomes)
        .map(|(&item, o)| match *o {
            Outcome::Matched(p) => items[p],
            _ => item,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeWindow {
    /// The exchanged sequence. Open agents are left in place but lie outside
    /// the certified region.
    pub items: Vec<Item>,
    /// Forward outcomes of the original window.
    pub outcomes: Vec<Outcome>,
    /// Length of the certified prefix: it ends at the last instant with no
    /// waiting agent, so every match inside it is complete and no match
    /// crosses its edge.
    pub certified: usize,
}

impl ExchangeWindow {
    pub fn certified_items(&self) -> &[Item] {
        &self.items[..self.certified]
    }

    /// The first `len` exchanged items, if they are all certified.
    pub fn prefix(&self, len: usize) -> Result<&[Item], SimError> {
        if len > self.certified {
            return Err(SimError::OpenWindow {
                requested: len,
                certified: self.certified,
            });
        }
        Ok(&self.items[..len])
    }
}

pub fn exchange_transform(model: &MatchingModel, items: &[Item]) -> ExchangeWindow {
    let (outcomes, certified) = match_forward(model, items);
    ExchangeWindow {
        items: exchange_with(items, &outcomes),
        outcomes,
        certified,
    }
}

/// Pearson goodness-of-fit statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub observed: Vec<u64>,
    pub expected: Vec<f64>,
}

impl ChiSquare {
    pub fn new(observed: Vec<u64>, probabilities: &[f64]) -> Self {
        let n: u64 = observed.iter().sum();
        let expected: Vec<f64> = probabilities.iter().map(|p| p * n as f64).collect();
        let statistic = observed
            .iter()
            .zip(&expected)
            .filter(|(_, e)| **e > 0.0)
            .map(|(&o, &e)| (o as f64 - e) * (o as f64 - e) / e)
            .sum();
        Self {
            statistic,
            dof: observed.len().saturating_sub(1),
            observed,
            expected,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReversibilityReport {
    pub events: usize,
    pub certified: usize,
    pub pairs_checked: usize,
    pub pairs_reproduced: usize,
    pub lost_checked: usize,
    pub lost_reproduced: usize,
    /// Item categories of the certified exchanged sequence against the
    /// arrival law.
    pub chi_square: ChiSquare,
}

impl ReversibilityReport {
    pub fn all_reproduced(&self) -> bool {
        self.pairs_reproduced == self.pairs_checked && self.lost_reproduced == self.lost_checked
    }
}

/// Compares reversed-time matching of the exchanged window with the forward
/// matches on the certified region.
pub fn check_window(model: &MatchingModel, items: &[Item]) -> ReversibilityReport {
    let window = exchange_transform(model, items);
    let region = window.certified_items();
    let reversed = match_reversed(model, region);
    let mut report = ReversibilityReport {
        events: items.len(),
        certified: window.certified,
        pairs_checked: 0,
        pairs_reproduced: 0,
        lost_checked: 0,
        lost_reproduced: 0,
        chi_square: ChiSquare::new(Vec::new(), &[]),
    };
    for (k, (&fwd, &rev)) in window.outcomes[..window.certified]
        .iter()
        .zip(&reversed)
        .enumerate()
    {
        match fwd {
            Outcome::Matched(p) if p > k => {
                report.pairs_checked += 1;
                report.pairs_reproduced += usize::from(rev == fwd);
            }
            Outcome::Lost => {
                report.lost_checked += 1;
                report.lost_reproduced += usize::from(rev == Outcome::Lost);
            }
            _ => {}
        }
    }
    let ni = model.n_agents();
    let mut observed = vec![0u64; ni + model.n_goods()];
    for item in region {
        observed[item.category(ni)] += 1;
    }
    let probabilities = ItemSampler::new(model).category_probabilities(model);
    report.chi_square = ChiSquare::new(observed, &probabilities);
    report
}

/// Draws `events` items with `seed` (the same item stream as a simulation
/// with that seed) and checks the window.
pub fn verify_reversibility(
    model: &MatchingModel,
    events: usize,
    seed: u64,
) -> ReversibilityReport {
    let sampler = ItemSampler::new(model);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items: Vec<Item> = (0..events).map(|_| sampler.sample(&mut rng)).collect();
    check_window(model, &items)
}
