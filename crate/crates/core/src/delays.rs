//! Delay and waiting-time distributions of matched pairs.
//!
//! Conditional on the first-appearance order `(C_1, .., C_k)` and on a good
//! matching the agent at position `l`, the number of items between the two
//! is a sum of independent geometric stages `h = l..k` with success
//! probabilities `p_h = (mu_S(C_1..C_h) - lambda_{C_1..C_h}) / (lambda_bar + mu_bar)`.
//! Under Poisson arrivals each stage becomes exponential with rate
//! `mu_S - lambda`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::analytic::{
    enumerate_terms, prefix_rates, EnumerationOptions, PermutationTerm, RateReport, TermVisitor,
};
use crate::analytic::{Accumulator, Analysis};
use crate::error::{AnalyticError, ModelError};
use crate::math;
use crate::model::MatchingModel;
use crate::pairs::PairMap;
use crate::sum::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    pub fn std_dev(&self) -> f64 {
        math::sqrt(self.variance)
    }

    /// Mixture of `(weight, moments)` components; weights must sum to 1.
    pub fn mixture(parts: impl IntoIterator<Item = (f64, Moments)> + Clone) -> Moments {
        let mean: f64 = parts
            .clone()
            .into_iter()
            .map(|(w, m)| w * m.mean)
            .sum::<CompensatedSum>()
            .value();
        // law of total variance
        let second: f64 = parts
            .into_iter()
            .map(|(w, m)| w * (m.variance + m.mean * m.mean))
            .sum::<CompensatedSum>()
            .value();
        Moments {
            mean,
            variance: (second - mean * mean).max(0.0),
        }
    }
}

/// Delay (`L`, in sequence positions) and wait (`W`, in time under Poisson
/// arrivals) moments per matched pair and per agent type.
///
/// Pairs with zero matching rate have no moments and are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayReport {
    pub pair: PairMap<Moments>,
    pub agent: Vec<Option<Moments>>,
    pub wait_pair: PairMap<Moments>,
    pub wait_agent: Vec<Option<Moments>>,
}

impl DelayReport {
    pub(crate) fn from_pairs(
        model: &MatchingModel,
        rates: &RateReport,
        pair: PairMap<Moments>,
        wait_pair: PairMap<Moments>,
    ) -> Self {
        let agent_level = |per_pair: &PairMap<Moments>| -> Vec<Option<Moments>> {
            (0..model.n_agents())
                .map(|a| {
                    let parts: Vec<(f64, Moments)> = per_pair
                        .agent_column(a)
                        .filter_map(|(g, m)| Some((*rates.theta.get(g, a)?, *m)))
                        .collect();
                    if parts.is_empty() {
                        None
                    } else {
                        Some(Moments::mixture(parts.iter().copied()))
                    }
                })
                .collect()
        };
        Self {
            agent: agent_level(&pair),
            wait_agent: agent_level(&wait_pair),
            pair,
            wait_pair,
        }
    }
}

/// One geometric stage of the delay distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricStage {
    /// Success probability per position.
    pub p: f64,
}

impl GeometricStage {
    pub fn mean(&self) -> f64 {
        1.0 / self.p
    }

    pub fn variance(&self) -> f64 {
        (1.0 - self.p) / (self.p * self.p)
    }

    /// `E z^L = z p / (1 - z (1 - p))`.
    pub fn pgf(&self, z: f64) -> f64 {
        z * self.p / (1.0 - z * (1.0 - self.p))
    }
}

/// The stage associated with the prefix `prefix` of a first-appearance order.
pub fn geometric_stage(
    model: &MatchingModel,
    prefix: &[usize],
) -> Result<GeometricStage, AnalyticError> {
    let Some(&(lambda, mu)) = prefix_rates(model, prefix)?.last() else {
        return Err(AnalyticError::DomainError {
            value: 0.0,
            domain: "nonempty prefix".into(),
        });
    };
    Ok(GeometricStage {
        p: (mu - lambda) / model.total_rate(),
    })
}

/// Delay and wait moments under the default type cap.
pub fn delay_moments(model: &MatchingModel) -> Result<DelayReport, AnalyticError> {
    Ok(full(model)?.delays)
}

/// Same report as [`delay_moments`]; the wait fields are the Poisson-time
/// analogues.
pub fn wait_moments(model: &MatchingModel) -> Result<DelayReport, AnalyticError> {
    delay_moments(model)
}

fn full(model: &MatchingModel) -> Result<Analysis, AnalyticError> {
    crate::analytic::analyze(model, &EnumerationOptions::default())
}

/// `E z^{L}` for the delay of pair `(good, agent)`, `z` in `[0, 1]`.
pub fn delay_pgf(
    model: &MatchingModel,
    good: usize,
    agent: usize,
    z: f64,
) -> Result<f64, AnalyticError> {
    if !(0.0..=1.0).contains(&z) {
        return Err(AnalyticError::DomainError {
            value: z,
            domain: String::from("[0, 1]"),
        });
    }
    Ok(pair_transform(model, good, agent, Transform::Pgf(z))?.value)
}

/// `E e^{s W}` for the wait of pair `(good, agent)`; `s` must lie below every
/// stage rate the pair can go through.
pub fn wait_mgf(
    model: &MatchingModel,
    good: usize,
    agent: usize,
    s: f64,
) -> Result<f64, AnalyticError> {
    if !s.is_finite() {
        return Err(AnalyticError::DomainError {
            value: s,
            domain: String::from("finite"),
        });
    }
    let out = pair_transform(model, good, agent, Transform::Mgf(s))?;
    if !(s < out.min_gap) {
        return Err(AnalyticError::DomainError {
            value: s,
            domain: alloc::format!("s < {}", out.min_gap),
        });
    }
    Ok(out.value)
}

#[derive(Debug, Clone, Copy)]
enum Transform {
    Pgf(f64),
    Mgf(f64),
}

struct TransformOutput {
    value: f64,
    min_gap: f64,
}

struct TransformVisitor {
    good: usize,
    agent: usize,
    total_rate: f64,
    transform: Transform,
    weight: CompensatedSum,
    value: CompensatedSum,
    min_gap: f64,
}

impl TermVisitor for TransformVisitor {
    fn visit(&mut self, term: &PermutationTerm<'_>) {
        let Some(l) = term.match_position(self.good) else {
            return;
        };
        if term.order[l] != self.agent {
            return;
        }
        let mut product = 1.0;
        for h in l..term.len() {
            let gap = term.gap(h);
            self.min_gap = self.min_gap.min(gap);
            product *= match self.transform {
                Transform::Pgf(z) => GeometricStage {
                    p: gap / self.total_rate,
                }
                .pgf(z),
                Transform::Mgf(s) => gap / (gap - s),
            };
        }
        self.weight += term.weight;
        self.value += term.weight * product;
    }
}

impl Accumulator for TransformVisitor {
    fn merge(&mut self, other: Self) {
        self.weight += other.weight;
        self.value += other.value;
        self.min_gap = self.min_gap.min(other.min_gap);
    }
}

fn pair_transform(
    model: &MatchingModel,
    good: usize,
    agent: usize,
    transform: Transform,
) -> Result<TransformOutput, AnalyticError> {
    if good >= model.n_goods() || agent >= model.n_agents() || !model.compatible(good, agent) {
        return Err(ModelError::NotAnEdge {
            good: name_or_index(model.good_names(), good),
            agent: name_or_index(model.agent_names(), agent),
        }
        .into());
    }
    let acc = enumerate_terms(model, &EnumerationOptions::default(), || TransformVisitor {
        good,
        agent,
        total_rate: model.total_rate(),
        transform,
        weight: CompensatedSum::new(),
        value: CompensatedSum::new(),
        min_gap: f64::INFINITY,
    })?;
    let weight = acc.weight.value();
    if !(weight > 0.0) {
        return Err(AnalyticError::ZeroRate {
            good: model.good_name(good).into(),
            agent: model.agent_name(agent).into(),
        });
    }
    Ok(TransformOutput {
        value: acc.value.value() / weight,
        min_gap: acc.min_gap,
    })
}

fn name_or_index(names: &[String], i: usize) -> String {
    names
        .get(i)
        .cloned()
        .unwrap_or_else(|| alloc::format!("#{i}"))
}
