//! Normalizing constant, first-appearance probabilities and matching rates.
//!
//! The stationary law of the unmatched-agent process, projected onto the
//! order in which agent types first appear, has product form:
//!
//! ```text
//! pi(C_1, .., C_k) = B * prod_l lambda_{C_l} / (mu_S({C_1..C_l}) - lambda_{C_1..C_l})
//! ```
//!
//! Everything else — rates, delay and wait moments — is a weighted sum over
//! the same ordered subsets, so it is all computed in one enumeration.

mod accumulate;
mod enumerate;

use alloc::vec::Vec;

pub use accumulate::{MetricsAccumulator, WeightSum};
pub use enumerate::{
    enumerate_terms, Accumulator, Enumeration, EnumerationOptions, PermutationTerm, TermVisitor,
    DEFAULT_TYPE_CAP, STABILITY_MARGIN,
};

use crate::delays::DelayReport;
use crate::error::{AnalyticError, ModelError};
use crate::model::{AgentSet, GoodSet, MatchingModel};
use crate::pairs::PairMap;
use crate::sum::CompensatedSum;

/// Long-run fractions of goods by outcome. All values are fractions of the
/// total number of goods.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// Normalizing constant: the probability of an empty queue.
    pub b: f64,
    /// `r_{s_j,c_i}` on the edges of the compatibility graph.
    pub rates: PairMap<f64>,
    /// `r_{s_j,lost}`, by good type.
    pub loss: Vec<f64>,
    /// Fraction of `s_j` goods matched to `c_i`.
    pub eta: PairMap<f64>,
    /// Fraction of `s_j` goods that are lost.
    pub eta_lost: Vec<f64>,
    /// Fraction of `c_i` agents matched to `s_j`.
    pub theta: PairMap<f64>,
}

impl RateReport {
    pub(crate) fn from_rates(model: &MatchingModel, b: f64, rates: PairMap<f64>) -> Self {
        let loss: Vec<f64> = (0..model.n_goods())
            .map(|j| {
                let mut left = CompensatedSum::starting_at(model.mu(j) / model.mu_bar());
                for (_, r) in rates.good_row(j) {
                    left += -r;
                }
                left.value()
            })
            .collect();
        let good_total: Vec<f64> = (0..model.n_goods())
            .map(|j| {
                loss[j]
                    + rates
                        .good_row(j)
                        .map(|(_, r)| r)
                        .sum::<CompensatedSum>()
                        .value()
            })
            .collect();
        let agent_total: Vec<f64> = (0..model.n_agents())
            .map(|i| {
                rates
                    .agent_column(i)
                    .map(|(_, r)| r)
                    .sum::<CompensatedSum>()
                    .value()
            })
            .collect();
        let eta = PairMap::from_edges(model, |g, a| Some(rates.get(g, a)? / good_total[g]));
        let eta_lost = loss.iter().zip(&good_total).map(|(l, t)| l / t).collect();
        let theta = PairMap::from_edges(model, |g, a| Some(rates.get(g, a)? / agent_total[a]));
        Self {
            b,
            rates,
            loss,
            eta,
            eta_lost,
            theta,
        }
    }

    pub fn rate(&self, good: usize, agent: usize) -> Option<f64> {
        self.rates.get(good, agent).copied()
    }

    /// `sum_j r_{s_j,c_i}`: matches involving agent type `agent`.
    pub fn agent_throughput(&self, agent: usize) -> f64 {
        self.rates
            .agent_column(agent)
            .map(|(_, r)| r)
            .sum::<CompensatedSum>()
            .value()
    }

    pub fn total_matched(&self) -> f64 {
        self.rates
            .iter()
            .map(|(_, _, r)| r)
            .sum::<CompensatedSum>()
            .value()
    }

    pub fn total_loss(&self) -> f64 {
        self.loss.iter().sum::<CompensatedSum>().value()
    }
}

/// Rates together with delay and wait moments.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub rates: RateReport,
    pub delays: DelayReport,
}

/// Runs the full single-pass analysis.
pub fn analyze(
    model: &MatchingModel,
    options: &EnumerationOptions,
) -> Result<Analysis, AnalyticError> {
    let acc = enumerate_terms(model, options, || MetricsAccumulator::new(model, true))?;
    let (rates, delays) = acc.finish(model);
    Ok(Analysis {
        rates,
        delays: delays.expect("moments were accumulated"),
    })
}

/// `B = (1 + sum over ordered nonempty subsets of their weight)^-1`.
pub fn normalizing_constant(model: &MatchingModel) -> Result<f64, AnalyticError> {
    let sum = enumerate_terms(model, &EnumerationOptions::default(), WeightSum::default)?;
    Ok(1.0 / sum.value())
}

/// Matching and loss rates (without moments) under the default type cap.
pub fn matching_rates(model: &MatchingModel) -> Result<RateReport, AnalyticError> {
    matching_rates_with(model, &EnumerationOptions::default())
}

pub fn matching_rates_with(
    model: &MatchingModel,
    options: &EnumerationOptions,
) -> Result<RateReport, AnalyticError> {
    let acc = enumerate_terms(model, options, || MetricsAccumulator::new(model, false))?;
    Ok(acc.finish(model).0)
}

/// Stationary probability that the unmatched agents show exactly the types
/// in `order`, in that order of first appearance.
pub fn pi_y_perm(model: &MatchingModel, order: &[usize]) -> Result<f64, AnalyticError> {
    let weight = ordered_weight(model, order)?;
    Ok(normalizing_constant(model)? * weight)
}

/// [`pi_y_perm`] with types given by name.
pub fn pi_y_perm_named<'a>(
    model: &MatchingModel,
    order: impl IntoIterator<Item = &'a str>,
) -> Result<f64, AnalyticError> {
    let order = order
        .into_iter()
        .map(|name| model.agent_index(name))
        .collect::<Result<Vec<_>, _>>()?;
    pi_y_perm(model, &order)
}

/// Checks that `order` lists distinct, existing agent types.
pub(crate) fn check_order(model: &MatchingModel, order: &[usize]) -> Result<(), ModelError> {
    let mut seen = AgentSet::EMPTY;
    for &i in order {
        if i >= model.n_agents() {
            return Err(ModelError::IndexOutOfRange {
                side: crate::error::Side::Agent,
                index: i,
            });
        }
        if seen.contains(i) {
            return Err(ModelError::DuplicateType {
                name: model.agent_name(i).into(),
            });
        }
        seen.insert(i);
    }
    Ok(())
}

/// Per-prefix `(lambda, mu)` of an ordered subset.
pub(crate) fn prefix_rates(
    model: &MatchingModel,
    order: &[usize],
) -> Result<Vec<(f64, f64)>, AnalyticError> {
    check_order(model, order)?;
    let mut covered = GoodSet::EMPTY;
    let mut lambda = 0.0;
    let mut mu = 0.0;
    let mut out = Vec::with_capacity(order.len());
    for (l, &i) in order.iter().enumerate() {
        let delta = model.goods_of(i).difference(covered);
        covered = covered.union(delta);
        lambda += model.lambda(i);
        mu += model.mu_of(delta);
        let margin = (mu - lambda) / model.total_rate();
        if !(margin >= STABILITY_MARGIN) {
            return Err(AnalyticError::UnstableModel {
                prefix: model.agent_names_of(&order[..=l]),
                margin,
            });
        }
        out.push((lambda, mu));
    }
    Ok(out)
}

fn ordered_weight(model: &MatchingModel, order: &[usize]) -> Result<f64, AnalyticError> {
    let prefixes = prefix_rates(model, order)?;
    Ok(order
        .iter()
        .zip(&prefixes)
        .map(|(&i, &(lambda, mu))| model.lambda(i) / (mu - lambda))
        .product())
}
