//! The matching model: agent and good types, their frequencies, the
//! compatibility graph and the aggregate arrival rates.

mod predicates;
mod sets;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{ModelError, Side, ValidationErrors};

pub use predicates::{AgentSubset, GoodSubset, MaxStableRho, Stability};
pub use sets::{AgentSet, GoodSet, SetIter, SubsetsByCardinality};

/// Largest number of agent or good types a model may declare.
pub const MAX_TYPES: usize = 64;

/// Absolute tolerance on `sum(alpha) = 1` and `sum(beta) = 1`.
pub const FREQUENCY_SUM_TOLERANCE: f64 = 1e-12;

/// Unvalidated model description, as read from a model file.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    /// `(name, alpha)` in canonical order.
    pub agents: Vec<(String, f64)>,
    /// `(name, beta)` in canonical order.
    pub goods: Vec<(String, f64)>,
    /// `(good name, agent name)` compatibility pairs.
    pub edges: Vec<(String, String)>,
    pub lambda_bar: f64,
    pub mu_bar: f64,
}

/// A validated matching model. Immutable; every derived quantity is cached
/// at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingModel {
    agent_names: Vec<String>,
    good_names: Vec<String>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    lambda: Vec<f64>,
    mu: Vec<f64>,
    goods_of_agent: Vec<GoodSet>,
    agents_of_good: Vec<AgentSet>,
    lambda_bar: f64,
    mu_bar: f64,
}

impl MatchingModel {
    /// Validates `spec`, reporting every violated invariant at once.
    pub fn new(spec: ModelSpec) -> Result<Self, ValidationErrors> {
        let mut errors = Vec::new();

        for (which, value) in [("lambda_bar", spec.lambda_bar), ("mu_bar", spec.mu_bar)] {
            if !(value > 0.0 && value.is_finite()) {
                errors.push(ModelError::NonPositiveRate { which, value });
            }
        }

        check_side(Side::Agent, &spec.agents, &mut errors);
        check_side(Side::Good, &spec.goods, &mut errors);

        let agent_index = |name: &str| spec.agents.iter().position(|(n, _)| n == name);
        let good_index = |name: &str| spec.goods.iter().position(|(n, _)| n == name);

        let too_many = spec.agents.len() > MAX_TYPES || spec.goods.len() > MAX_TYPES;
        let mut goods_of_agent = alloc::vec![GoodSet::EMPTY; spec.agents.len()];
        let mut agents_of_good = alloc::vec![AgentSet::EMPTY; spec.goods.len()];
        for (good, agent) in &spec.edges {
            let g = good_index(good);
            let a = agent_index(agent);
            if g.is_none() {
                errors.push(ModelError::UnknownIdentifier {
                    side: Side::Good,
                    name: good.clone(),
                });
            }
            if a.is_none() {
                errors.push(ModelError::UnknownIdentifier {
                    side: Side::Agent,
                    name: agent.clone(),
                });
            }
            if let (Some(g), Some(a), false) = (g, a, too_many) {
                goods_of_agent[a].insert(g);
                agents_of_good[g].insert(a);
            }
        }

        if !too_many {
            for (i, (name, _)) in spec.agents.iter().enumerate() {
                if goods_of_agent[i].is_empty() {
                    errors.push(ModelError::IsolatedAgentType { name: name.clone() });
                }
            }
        }

        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }

        let (agent_names, alpha): (Vec<_>, Vec<_>) = spec.agents.into_iter().unzip();
        let (good_names, beta): (Vec<_>, Vec<_>) = spec.goods.into_iter().unzip();
        let lambda = alpha.iter().map(|a| spec.lambda_bar * a).collect();
        let mu = beta.iter().map(|b| spec.mu_bar * b).collect();
        Ok(Self {
            agent_names,
            good_names,
            alpha,
            beta,
            lambda,
            mu,
            goods_of_agent,
            agents_of_good,
            lambda_bar: spec.lambda_bar,
            mu_bar: spec.mu_bar,
        })
    }

    /// Returns the description this model was built from (edges in
    /// good-major canonical order).
    pub fn to_spec(&self) -> ModelSpec {
        ModelSpec {
            agents: self
                .agent_names
                .iter()
                .cloned()
                .zip(self.alpha.iter().copied())
                .collect(),
            goods: self
                .good_names
                .iter()
                .cloned()
                .zip(self.beta.iter().copied())
                .collect(),
            edges: self
                .edges()
                .map(|(g, a)| (self.good_names[g].clone(), self.agent_names[a].clone()))
                .collect(),
            lambda_bar: self.lambda_bar,
            mu_bar: self.mu_bar,
        }
    }

    /// Same frequencies and graph, new aggregate agent rate.
    pub fn with_lambda_bar(&self, lambda_bar: f64) -> Result<Self, ModelError> {
        if !(lambda_bar > 0.0 && lambda_bar.is_finite()) {
            return Err(ModelError::NonPositiveRate {
                which: "lambda_bar",
                value: lambda_bar,
            });
        }
        let mut next = self.clone();
        next.lambda_bar = lambda_bar;
        next.lambda = self.alpha.iter().map(|a| lambda_bar * a).collect();
        Ok(next)
    }

    /// Rescales the agent rate so that `lambda_bar / mu_bar = rho`.
    pub fn with_traffic(&self, rho: f64) -> Result<Self, ModelError> {
        self.with_lambda_bar(rho * self.mu_bar)
    }

    pub fn n_agents(&self) -> usize {
        self.agent_names.len()
    }

    pub fn n_goods(&self) -> usize {
        self.good_names.len()
    }

    pub fn agent_name(&self, i: usize) -> &str {
        &self.agent_names[i]
    }

    pub fn good_name(&self, j: usize) -> &str {
        &self.good_names[j]
    }

    pub fn agent_names(&self) -> &[String] {
        &self.agent_names
    }

    pub fn good_names(&self) -> &[String] {
        &self.good_names
    }

    pub fn agent_index(&self, name: &str) -> Result<usize, ModelError> {
        self.agent_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ModelError::UnknownIdentifier {
                side: Side::Agent,
                name: name.to_string(),
            })
    }

    pub fn good_index(&self, name: &str) -> Result<usize, ModelError> {
        self.good_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ModelError::UnknownIdentifier {
                side: Side::Good,
                name: name.to_string(),
            })
    }

    /// Resolves agent identifiers to a set.
    pub fn agent_set<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<AgentSet, ModelError> {
        names
            .into_iter()
            .map(|n| self.agent_index(n))
            .collect::<Result<AgentSet, _>>()
    }

    /// Resolves good identifiers to a set.
    pub fn good_set<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<GoodSet, ModelError> {
        names
            .into_iter()
            .map(|n| self.good_index(n))
            .collect::<Result<GoodSet, _>>()
    }

    pub fn alpha(&self, i: usize) -> f64 {
        self.alpha[i]
    }

    pub fn beta(&self, j: usize) -> f64 {
        self.beta[j]
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    pub fn betas(&self) -> &[f64] {
        &self.beta
    }

    /// `lambda_{c_i} = lambda_bar * alpha_{c_i}`.
    pub fn lambda(&self, i: usize) -> f64 {
        self.lambda[i]
    }

    /// `mu_{s_j} = mu_bar * beta_{s_j}`.
    pub fn mu(&self, j: usize) -> f64 {
        self.mu[j]
    }

    pub fn lambda_bar(&self) -> f64 {
        self.lambda_bar
    }

    pub fn mu_bar(&self) -> f64 {
        self.mu_bar
    }

    /// `lambda_bar + mu_bar`, the rate of the merged arrival stream.
    pub fn total_rate(&self) -> f64 {
        self.lambda_bar + self.mu_bar
    }

    /// Traffic intensity `lambda_bar / mu_bar`.
    pub fn rho(&self) -> f64 {
        self.lambda_bar / self.mu_bar
    }

    pub fn all_agents(&self) -> AgentSet {
        AgentSet::full(self.n_agents())
    }

    pub fn all_goods(&self) -> GoodSet {
        GoodSet::full(self.n_goods())
    }

    /// `S(c_i)`.
    #[inline]
    pub fn goods_of(&self, agent: usize) -> GoodSet {
        self.goods_of_agent[agent]
    }

    /// `C(s_j)`.
    #[inline]
    pub fn agents_of(&self, good: usize) -> AgentSet {
        self.agents_of_good[good]
    }

    #[inline]
    pub fn compatible(&self, good: usize, agent: usize) -> bool {
        self.agents_of_good[good].contains(agent)
    }

    /// Compatibility pairs `(good, agent)`, good-major in declared order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.agents_of_good
            .iter()
            .enumerate()
            .flat_map(|(g, agents)| agents.iter().map(move |a| (g, a)))
    }

    pub fn n_edges(&self) -> usize {
        self.agents_of_good.iter().map(|s| s.len()).sum()
    }

    pub fn alpha_of(&self, set: AgentSet) -> f64 {
        set.iter().map(|i| self.alpha[i]).sum()
    }

    pub fn beta_of(&self, set: GoodSet) -> f64 {
        set.iter().map(|j| self.beta[j]).sum()
    }

    pub fn lambda_of(&self, set: AgentSet) -> f64 {
        set.iter().map(|i| self.lambda[i]).sum()
    }

    pub fn mu_of(&self, set: GoodSet) -> f64 {
        set.iter().map(|j| self.mu[j]).sum()
    }

    /// `S(C)`, as a plain set.
    pub fn goods_of_set(&self, set: AgentSet) -> GoodSet {
        set.iter()
            .fold(GoodSet::EMPTY, |acc, i| acc.union(self.goods_of_agent[i]))
    }

    /// `C(S)`, as a plain set.
    pub fn agents_of_set(&self, set: GoodSet) -> AgentSet {
        set.iter()
            .fold(AgentSet::EMPTY, |acc, j| acc.union(self.agents_of_good[j]))
    }

    pub(crate) fn agent_names_of(&self, order: &[usize]) -> Vec<String> {
        order.iter().map(|&i| self.agent_names[i].clone()).collect()
    }
}

fn check_side(side: Side, entries: &[(String, f64)], errors: &mut Vec<ModelError>) {
    if entries.len() > MAX_TYPES {
        errors.push(ModelError::TooManyTypes {
            side,
            count: entries.len(),
            max: MAX_TYPES,
        });
    }
    for (k, (name, value)) in entries.iter().enumerate() {
        if entries[..k].iter().any(|(n, _)| n == name) {
            errors.push(ModelError::DuplicateIdentifier {
                side,
                name: name.clone(),
            });
        }
        if !(*value > 0.0 && value.is_finite()) {
            errors.push(ModelError::NonPositiveFrequency {
                side,
                name: name.clone(),
                value: *value,
            });
        }
    }
    let sum: f64 = entries.iter().map(|(_, v)| v).sum();
    if !((sum - 1.0).abs() <= FREQUENCY_SUM_TOLERANCE) {
        errors.push(ModelError::FrequencySumError { side, sum });
    }
}
