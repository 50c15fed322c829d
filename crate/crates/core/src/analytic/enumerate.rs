//! Depth-first enumeration of ordered subsets `(C_1, .., C_k)` of agent
//! types, with incrementally maintained prefix sums.

use alloc::vec::Vec;

use crate::error::AnalyticError;
use crate::model::{AgentSet, GoodSet, MatchingModel, MAX_TYPES};

/// Default cap on the number of agent types. There are about `e * I!` terms,
/// so 12 types already means ~1.3e9 of them.
pub const DEFAULT_TYPE_CAP: usize = 12;

/// Smallest admissible `(mu_S(C) - lambda_C) / (lambda_bar + mu_bar)` for any
/// prefix. Anything below is reported as unstable.
pub const STABILITY_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub max_types: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            max_types: DEFAULT_TYPE_CAP,
        }
    }
}

impl EnumerationOptions {
    /// Lifts the cap to the largest representable model.
    pub fn uncapped() -> Self {
        Self {
            max_types: MAX_TYPES,
        }
    }
}

/// One ordered subset `(C_1, .., C_k)` and its stationary weight.
///
/// All slices have length `k`; entry `l` describes the prefix
/// `{C_1, .., C_{l+1}}`.
#[derive(Debug, Clone, Copy)]
pub struct PermutationTerm<'a> {
    pub order: &'a [usize],
    /// `lambda_{C_1..C_l}`
    pub prefix_lambda: &'a [f64],
    /// `mu_S({C_1..C_l})`
    pub prefix_mu: &'a [f64],
    /// Goods first covered by `C_l`: an arriving good of such a type matches
    /// an agent of type `C_l` in this state.
    pub new_goods: &'a [GoodSet],
    /// `prod_l lambda_{C_l} / (prefix_mu[l] - prefix_lambda[l])`,
    /// proportional to the probability that the unmatched agents show
    /// exactly these types in this first-appearance order.
    pub weight: f64,
}

impl PermutationTerm<'_> {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Spare capacity `mu_S - lambda` of prefix `l` (0-based).
    #[inline]
    pub fn gap(&self, l: usize) -> f64 {
        self.prefix_mu[l] - self.prefix_lambda[l]
    }

    /// Position `l` at which a good of type `good` is matched, if any.
    pub fn match_position(&self, good: usize) -> Option<usize> {
        self.new_goods.iter().position(|s| s.contains(good))
    }
}

pub trait TermVisitor {
    fn visit(&mut self, term: &PermutationTerm<'_>);
}

/// A visitor whose partial results combine by associative addition.
pub trait Accumulator: TermVisitor {
    fn merge(&mut self, other: Self);
}

/// Enumerates every ordered nonempty subset of agent types of a model.
///
/// The terms split into one branch per choice of `C_1`; branches can be
/// evaluated independently and merged in declared type order.
#[derive(Debug, Clone, Copy)]
pub struct Enumeration<'m> {
    model: &'m MatchingModel,
}

impl<'m> Enumeration<'m> {
    pub fn new(
        model: &'m MatchingModel,
        options: &EnumerationOptions,
    ) -> Result<Self, AnalyticError> {
        let types = model.n_agents();
        if types > options.max_types {
            return Err(AnalyticError::TooManyTypes {
                types,
                cap: options.max_types,
            });
        }
        Ok(Self { model })
    }

    pub fn model(&self) -> &'m MatchingModel {
        self.model
    }

    pub fn n_branches(&self) -> usize {
        self.model.n_agents()
    }

    /// Visits every term whose first type is `first`, depth-first, extending
    /// in declared type order.
    pub fn visit_branch<V: TermVisitor + ?Sized>(
        &self,
        first: usize,
        visitor: &mut V,
    ) -> Result<(), AnalyticError> {
        let mut dfs = Dfs::with_capacity(self.model.n_agents());
        dfs.push(self.model, first)?;
        dfs.descend(self.model, AgentSet::singleton(first), visitor)
    }

    /// Runs every branch with its own accumulator from `make` and merges the
    /// results in branch order.
    pub fn run<A: Accumulator>(&self, mut make: impl FnMut() -> A) -> Result<A, AnalyticError> {
        let mut total = make();
        for first in 0..self.n_branches() {
            let mut part = make();
            self.visit_branch(first, &mut part)?;
            total.merge(part);
        }
        Ok(total)
    }
}

/// Invokes an accumulator from `make` on every ordered nonempty subset of
/// agent types and returns the merged result.
pub fn enumerate_terms<A: Accumulator>(
    model: &MatchingModel,
    options: &EnumerationOptions,
    make: impl FnMut() -> A,
) -> Result<A, AnalyticError> {
    Enumeration::new(model, options)?.run(make)
}

struct Dfs {
    order: Vec<usize>,
    prefix_lambda: Vec<f64>,
    prefix_mu: Vec<f64>,
    new_goods: Vec<GoodSet>,
    covered: Vec<GoodSet>,
    weight: Vec<f64>,
}

impl Dfs {
    fn with_capacity(n: usize) -> Self {
        Self {
            order: Vec::with_capacity(n),
            prefix_lambda: Vec::with_capacity(n),
            prefix_mu: Vec::with_capacity(n),
            new_goods: Vec::with_capacity(n),
            covered: Vec::with_capacity(n),
            weight: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, model: &MatchingModel, agent: usize) -> Result<(), AnalyticError> {
        let (lambda, mu, covered, weight) = match self.order.len() {
            0 => (0.0, 0.0, GoodSet::EMPTY, 1.0),
            k => (
                self.prefix_lambda[k - 1],
                self.prefix_mu[k - 1],
                self.covered[k - 1],
                self.weight[k - 1],
            ),
        };
        let delta = model.goods_of(agent).difference(covered);
        let rate = model.lambda(agent);
        let lambda = lambda + rate;
        let mu = mu + model.mu_of(delta);
        let gap = mu - lambda;
        let margin = gap / model.total_rate();
        self.order.push(agent);
        if !(margin >= STABILITY_MARGIN) {
            return Err(AnalyticError::UnstableModel {
                prefix: model.agent_names_of(&self.order),
                margin,
            });
        }
        self.prefix_lambda.push(lambda);
        self.prefix_mu.push(mu);
        self.new_goods.push(delta);
        self.covered.push(covered.union(delta));
        self.weight.push(weight * rate / gap);
        Ok(())
    }

    fn pop(&mut self) {
        self.order.pop();
        self.prefix_lambda.pop();
        self.prefix_mu.pop();
        self.new_goods.pop();
        self.covered.pop();
        self.weight.pop();
    }

    fn descend<V: TermVisitor + ?Sized>(
        &mut self,
        model: &MatchingModel,
        used: AgentSet,
        visitor: &mut V,
    ) -> Result<(), AnalyticError> {
        let k = self.order.len();
        visitor.visit(&PermutationTerm {
            order: &self.order,
            prefix_lambda: &self.prefix_lambda,
            prefix_mu: &self.prefix_mu,
            new_goods: &self.new_goods,
            weight: self.weight[k - 1],
        });
        for next in used.complement(model.n_agents()) {
            self.push(model, next)?;
            self.descend(model, used.union(AgentSet::singleton(next)), visitor)?;
            self.pop();
        }
        Ok(())
    }
}
