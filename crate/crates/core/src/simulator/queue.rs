use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::sequence::Item;
use crate::model::{AgentSet, MatchingModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueuedAgent {
    pub agent: usize,
    /// Sequence position.
    pub index: u64,
    /// Arrival time under Poisson arrivals.
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepEvent {
    Queued {
        agent: usize,
    },
    Matched {
        good: usize,
        agent: usize,
        agent_index: u64,
        /// Good position minus agent position.
        delay: u64,
        wait: f64,
    },
    Lost {
        good: usize,
    },
}

/// Unmatched agents, oldest first.
#[derive(Debug, Clone, Default)]
pub struct UnmatchedList {
    agents: VecDeque<QueuedAgent>,
    per_type: Vec<u64>,
    present: AgentSet,
}

impl UnmatchedList {
    pub fn new(n_agents: usize) -> Self {
        Self {
            agents: VecDeque::new(),
            per_type: vec![0; n_agents],
            present: AgentSet::EMPTY,
        }
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &QueuedAgent> + '_ {
        self.agents.iter()
    }

    pub fn front(&self) -> Option<&QueuedAgent> {
        self.agents.front()
    }

    /// Agent types currently waiting.
    pub fn present_types(&self) -> AgentSet {
        self.present
    }

    pub fn count_of(&self, agent: usize) -> u64 {
        self.per_type[agent]
    }

    /// Applies one directed FCFS transition: agents join the back; a good
    /// takes the oldest compatible agent or is lost.
    pub fn step(&mut self, model: &MatchingModel, item: Item, index: u64, time: f64) -> StepEvent {
        match item {
            Item::Agent(agent) => {
                self.agents.push_back(QueuedAgent { agent, index, time });
                self.per_type[agent] += 1;
                self.present.insert(agent);
                StepEvent::Queued { agent }
            }
            Item::Good(good) => {
                if model.agents_of(good).intersection(self.present).is_empty() {
                    return StepEvent::Lost { good };
                }
                let pos = self
                    .agents
                    .iter()
                    .position(|q| model.compatible(good, q.agent))
                    .expect("a compatible type is present");
                let q = self.agents.remove(pos).expect("position is in range");
                self.per_type[q.agent] -= 1;
                if self.per_type[q.agent] == 0 {
                    self.present.remove(q.agent);
                }
                StepEvent::Matched {
                    good,
                    agent: q.agent,
                    agent_index: q.index,
                    delay: index - q.index,
                    wait: time - q.time,
                }
            }
        }
    }

    /// Writes the distinct waiting types in order of first appearance into
    /// `order` (cleared first).
    pub fn first_appearances_into(&self, order: &mut Vec<usize>) {
        order.clear();
        let want = self.present.len();
        let mut seen = AgentSet::EMPTY;
        for q in &self.agents {
            if order.len() == want {
                break;
            }
            if !seen.contains(q.agent) {
                seen.insert(q.agent);
                order.push(q.agent);
            }
        }
    }

    /// The first-appearance compression of the list after item `current`.
    pub fn y_state(&self, current: u64) -> YState {
        let mut order = Vec::new();
        let mut agent_gaps = Vec::new();
        let mut first_index = Vec::new();
        let mut seen = AgentSet::EMPTY;
        for q in &self.agents {
            if seen.contains(q.agent) {
                *agent_gaps.last_mut().expect("front is a first appearance") += 1;
            } else {
                seen.insert(q.agent);
                order.push(q.agent);
                agent_gaps.push(0);
                first_index.push(q.index);
            }
        }
        let stages = first_index
            .iter()
            .enumerate()
            .map(|(l, &m)| first_index.get(l + 1).copied().unwrap_or(current + 1) - m)
            .collect();
        YState {
            order,
            agent_gaps,
            stages,
        }
    }
}

/// Compression of the unmatched list to its first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct YState {
    /// `(C_1, .., C_k)`.
    pub order: Vec<usize>,
    /// `n_l`: agents after the first `C_l` and before the first `C_{l+1}`.
    pub agent_gaps: Vec<u64>,
    /// Positions from the first `C_l` to the first `C_{l+1}` (for the last
    /// type, to one past the current item), counting goods as well.
    pub stages: Vec<u64>,
}
