//! Compatibility neighbourhoods and structural predicates over subsets of
//! agent types.
//!
//! Subset scans are exponential in the number of agent types; they are run
//! in the canonical order of [`SubsetsByCardinality`].

use super::{AgentSet, GoodSet, MatchingModel, SubsetsByCardinality};

/// An agent subset with its cached frequency and rate sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentSubset {
    pub members: AgentSet,
    /// `alpha_C`
    pub alpha: f64,
    /// `lambda_C`
    pub lambda: f64,
}

/// A good subset with its cached frequency and rate sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoodSubset {
    pub members: GoodSet,
    /// `beta_S`
    pub beta: f64,
    /// `mu_S`
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stability {
    pub stable: bool,
    /// For unstable models: the agent subset with the largest excess
    /// `lambda_C - mu_S(C)`, smallest first, then lexicographically first.
    pub witness: Option<AgentSet>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxStableRho {
    /// `min over nonempty C of beta_S(C) / alpha_C`. Never exceeds 1, since
    /// `C` ranges over the full agent set too. The model is stable iff
    /// `lambda_bar / mu_bar` is strictly below this value.
    pub value: f64,
    /// The same minimum over proper nonempty subsets only (`None` when there
    /// is a single agent type). Exceeds 1 exactly when CRP holds.
    pub proper_min: Option<f64>,
}

impl MatchingModel {
    pub fn agent_subset(&self, members: AgentSet) -> AgentSubset {
        AgentSubset {
            members,
            alpha: self.alpha_of(members),
            lambda: self.lambda_of(members),
        }
    }

    pub fn good_subset(&self, members: GoodSet) -> GoodSubset {
        GoodSubset {
            members,
            beta: self.beta_of(members),
            mu: self.mu_of(members),
        }
    }

    /// `S(C)`: good types compatible with at least one member of `agents`.
    pub fn compatible_goods(&self, agents: AgentSet) -> GoodSubset {
        self.good_subset(self.goods_of_set(agents))
    }

    /// `C(S)`: agent types compatible with at least one member of `goods`.
    pub fn compatible_agents(&self, goods: GoodSet) -> AgentSubset {
        self.agent_subset(self.agents_of_set(goods))
    }

    /// `U(S)`: agent types compatible only with members of `goods`.
    pub fn unique_users(&self, goods: GoodSet) -> AgentSubset {
        let outside = goods.complement(self.n_goods());
        let users_outside = self.agents_of_set(outside);
        self.agent_subset(users_outside.complement(self.n_agents()))
    }

    /// Checks `lambda_C < mu_S(C)` for every nonempty agent subset. Equality
    /// counts as unstable.
    pub fn check_stability(&self) -> Stability {
        let mut worst: Option<(f64, AgentSet)> = None;
        for set in SubsetsByCardinality::new(self.n_agents()) {
            let lambda = self.lambda_of(set);
            let mu = self.mu_of(self.goods_of_set(set));
            if lambda < mu {
                continue;
            }
            let excess = lambda - mu;
            if worst.map_or(true, |(w, _)| excess > w) {
                worst = Some((excess, set));
            }
        }
        Stability {
            stable: worst.is_none(),
            witness: worst.map(|(_, set)| set),
        }
    }

    /// Complete resource pooling: `alpha_C < beta_S(C)` for every proper
    /// nonempty agent subset.
    pub fn check_crp(&self) -> bool {
        let all = self.all_agents();
        SubsetsByCardinality::new(self.n_agents())
            .filter(|&set| set != all)
            .all(|set| self.alpha_of(set) < self.beta_of(self.goods_of_set(set)))
    }

    pub fn max_stable_rho(&self) -> MaxStableRho {
        let all = self.all_agents();
        let mut value = f64::INFINITY;
        let mut proper_min: Option<f64> = None;
        for set in SubsetsByCardinality::new(self.n_agents()) {
            let ratio = self.beta_of(self.goods_of_set(set)) / self.alpha_of(set);
            value = value.min(ratio);
            if set != all {
                proper_min = Some(proper_min.map_or(ratio, |m| m.min(ratio)));
            }
        }
        MaxStableRho { value, proper_min }
    }
}
