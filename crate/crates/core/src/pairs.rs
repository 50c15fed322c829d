use alloc::vec::Vec;

use crate::model::MatchingModel;

/// Dense table indexed by `(good, agent)`. Cells outside the compatibility
/// graph, or whose value is undefined, are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMap<T> {
    n_agents: usize,
    cells: Vec<Option<T>>,
}

impl<T> PairMap<T> {
    pub fn empty(n_goods: usize, n_agents: usize) -> Self {
        let mut cells = Vec::with_capacity(n_goods * n_agents);
        cells.resize_with(n_goods * n_agents, || None);
        Self { n_agents, cells }
    }

    /// Fills every edge of `model` with `f(good, agent)`.
    pub fn from_edges(model: &MatchingModel, mut f: impl FnMut(usize, usize) -> Option<T>) -> Self {
        let mut map = Self::empty(model.n_goods(), model.n_agents());
        for (g, a) in model.edges() {
            map.cells[g * map.n_agents + a] = f(g, a);
        }
        map
    }

    pub fn get(&self, good: usize, agent: usize) -> Option<&T> {
        if agent >= self.n_agents {
            return None;
        }
        self.cells.get(good * self.n_agents + agent)?.as_ref()
    }

    pub fn set(&mut self, good: usize, agent: usize, value: Option<T>) {
        self.cells[good * self.n_agents + agent] = value;
    }

    pub fn n_goods(&self) -> usize {
        self.cells.len().checked_div(self.n_agents).unwrap_or(0)
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    /// Defined cells, good-major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        let n = self.n_agents;
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(k, v)| v.as_ref().map(|v| (k / n, k % n, v)))
    }

    /// Defined cells of one agent column.
    pub fn agent_column(&self, agent: usize) -> impl Iterator<Item = (usize, &T)> + '_ {
        (0..self.n_goods()).filter_map(move |g| self.get(g, agent).map(|v| (g, v)))
    }

    /// Defined cells of one good row.
    pub fn good_row(&self, good: usize) -> impl Iterator<Item = (usize, &T)> + '_ {
        (0..self.n_agents).filter_map(move |a| self.get(good, a).map(|v| (a, v)))
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> PairMap<U> {
        PairMap {
            n_agents: self.n_agents,
            cells: self.cells.iter().map(|c| c.as_ref().map(&mut f)).collect(),
        }
    }
}
