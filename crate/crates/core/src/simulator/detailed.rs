//! The detailed state: every item from the oldest unmatched agent up to the
//! current position, with matched pairs already exchanged.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::queue::{StepEvent, UnmatchedList};
use super::sequence::Item;
use crate::model::{AgentSet, MatchingModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    /// `c_i`: an agent still waiting.
    Agent,
    /// `s_j`: a good that has not been processed. Never part of a reachable
    /// detailed state.
    Good,
    /// `c~_i`: the agent of a matched pair, moved to its good's position.
    ExchangedAgent,
    /// `s~_j`: the good of a matched pair moved to its agent's position, or a
    /// lost good left in place.
    ExchangedGood,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UItem {
    pub mark: Mark,
    /// Agent type for `Agent`/`ExchangedAgent`, good type otherwise.
    pub ty: usize,
}

impl UItem {
    pub const fn new(mark: Mark, ty: usize) -> Self {
        Self { mark, ty }
    }
}

/// Maintains the detailed state alongside a simulation.
#[derive(Debug, Clone, Default)]
pub struct DetailedTracker {
    /// Sequence position of `entries[0]`.
    base: u64,
    entries: VecDeque<UItem>,
}

impl DetailedTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records the outcome of the item at position `index`.
    pub fn observe(&mut self, index: u64, event: &StepEvent) {
        match *event {
            StepEvent::Queued { agent } => {
                if self.entries.is_empty() {
                    self.base = index;
                }
                self.entries.push_back(UItem::new(Mark::Agent, agent));
            }
            StepEvent::Matched {
                good,
                agent,
                agent_index,
                ..
            } => {
                let at = (agent_index - self.base) as usize;
                self.entries[at] = UItem::new(Mark::ExchangedGood, good);
                self.entries
                    .push_back(UItem::new(Mark::ExchangedAgent, agent));
            }
            StepEvent::Lost { good } => {
                if !self.entries.is_empty() {
                    self.entries
                        .push_back(UItem::new(Mark::ExchangedGood, good));
                }
            }
        }
        while self.entries.front().is_some_and(|u| u.mark != Mark::Agent) {
            self.entries.pop_front();
            self.base += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &UItem> + '_ {
        self.entries.iter()
    }

    pub fn state(&self) -> Vec<UItem> {
        self.entries.iter().copied().collect()
    }
}

/// The detailed state after processing `items` from an empty start.
pub fn detailed_state(model: &MatchingModel, items: &[Item]) -> Vec<UItem> {
    let mut queue = UnmatchedList::new(model.n_agents());
    let mut tracker = DetailedTracker::new();
    for (k, &item) in items.iter().enumerate() {
        let index = k as u64 + 1;
        let event = queue.step(model, item, index, 0.0);
        tracker.observe(index, &event);
    }
    tracker.state()
}

/// Whether a detailed state can occur: it is empty, or it starts with a
/// waiting agent, holds only waiting agents and exchanged items, and no
/// waiting agent precedes an exchanged good it could have taken.
pub fn is_admissible(model: &MatchingModel, u: &[UItem]) -> bool {
    let Some(first) = u.first() else {
        return true;
    };
    if first.mark != Mark::Agent {
        return false;
    }
    let mut waiting = AgentSet::EMPTY;
    for item in u {
        match item.mark {
            Mark::Agent => {
                if item.ty >= model.n_agents() {
                    return false;
                }
                waiting.insert(item.ty);
            }
            Mark::ExchangedAgent => {
                if item.ty >= model.n_agents() {
                    return false;
                }
            }
            Mark::ExchangedGood => {
                if item.ty >= model.n_goods()
                    || !model.agents_of(item.ty).intersection(waiting).is_empty()
                {
                    return false;
                }
            }
            Mark::Good => return false,
        }
    }
    true
}
