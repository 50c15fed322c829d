//! Light-traffic limits, traffic-intensity sweeps and the dedicated-server
//! baseline.

use alloc::vec::Vec;

use crate::analytic::{analyze, EnumerationOptions, RateReport};
use crate::delays::DelayReport;
use crate::error::{AnalyticError, ModelError, Side};
use crate::model::{AgentSet, GoodSet, MatchingModel};
use crate::pairs::PairMap;

/// Limits of the matching fractions as `rho -> 0`.
///
/// When agents are rare, each one is matched by the first compatible good
/// that follows it, so agent type `c_i` meets good type `s_j` with
/// probability `mu_{s_j} / mu_S(c_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LightTraffic {
    /// `alpha_{c_i} * mu_{s_j} / mu_S(c_i)`; sums to 1 over all pairs. This
    /// is the agent-normalized convention: it equals `lim r / (lambda_bar / mu_bar)`.
    pub rates: PairMap<f64>,
    /// `mu_{s_j} / mu_S(c_i)`, the limit of `theta_{c_i}(s_j)`.
    pub theta: PairMap<f64>,
}

pub fn light_traffic_rates(model: &MatchingModel) -> LightTraffic {
    let reach: Vec<f64> = (0..model.n_agents())
        .map(|i| model.mu_of(model.goods_of(i)))
        .collect();
    let theta = PairMap::from_edges(model, |g, a| Some(model.mu(g) / reach[a]));
    let rates = PairMap::from_edges(model, |g, a| Some(model.alpha(a) * theta.get(g, a)?));
    LightTraffic { rates, theta }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub rho: f64,
    pub rates: RateReport,
    pub delays: DelayReport,
}

/// Metrics along a grid of traffic intensities, `mu_bar` held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSeries {
    pub rho_grid: Vec<f64>,
    pub points: Vec<SweepPoint>,
}

impl SweepSeries {
    pub fn rate_series(&self, good: usize, agent: usize) -> Vec<Option<f64>> {
        self.points
            .iter()
            .map(|p| p.rates.rate(good, agent))
            .collect()
    }

    pub fn loss_series(&self, good: usize) -> Vec<f64> {
        self.points.iter().map(|p| p.rates.loss[good]).collect()
    }

    pub fn delay_mean_series(&self, good: usize, agent: usize) -> Vec<Option<f64>> {
        self.points
            .iter()
            .map(|p| p.delays.pair.get(good, agent).map(|m| m.mean))
            .collect()
    }
}

/// `n` equally spaced points from `min` to `max` inclusive.
pub fn uniform_grid(min: f64, max: f64, n: usize) -> Result<Vec<f64>, AnalyticError> {
    if n == 0 || !(min <= max) || (n == 1 && min != max) {
        return Err(AnalyticError::InvalidGrid(alloc::format!(
            "{n} points from {min} to {max}"
        )));
    }
    if n == 1 {
        return Ok(alloc::vec![min]);
    }
    let step = (max - min) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| {
            if k + 1 == n {
                max
            } else {
                min + step * k as f64
            }
        })
        .collect())
}

/// Checks that the grid is strictly increasing inside `(0, 1)`.
pub fn validate_grid(grid: &[f64]) -> Result<(), AnalyticError> {
    if grid.is_empty() {
        return Err(AnalyticError::InvalidGrid("empty grid".into()));
    }
    if let Some(bad) = grid.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(AnalyticError::InvalidGrid(alloc::format!(
            "traffic intensity {bad} outside (0, 1)"
        )));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(AnalyticError::InvalidGrid(alloc::format!(
            "grid not strictly increasing at {} -> {}",
            w[0],
            w[1]
        )));
    }
    Ok(())
}

/// Rates and moments of `model` rescaled to traffic intensity `rho`.
pub fn sweep_point(
    model: &MatchingModel,
    rho: f64,
    options: &EnumerationOptions,
) -> Result<SweepPoint, AnalyticError> {
    let scaled = model.with_traffic(rho)?;
    if !scaled.check_stability().stable {
        return Err(AnalyticError::UnstableGridPoint { rho });
    }
    let analysis = analyze(&scaled, options).map_err(|e| match e {
        AnalyticError::UnstableModel { .. } => AnalyticError::UnstableGridPoint { rho },
        other => other,
    })?;
    Ok(SweepPoint {
        rho,
        rates: analysis.rates,
        delays: analysis.delays,
    })
}

pub fn sweep(model: &MatchingModel, grid: &[f64]) -> Result<SweepSeries, AnalyticError> {
    sweep_with(model, grid, &EnumerationOptions::default())
}

pub fn sweep_with(
    model: &MatchingModel,
    grid: &[f64],
    options: &EnumerationOptions,
) -> Result<SweepSeries, AnalyticError> {
    validate_grid(grid)?;
    let points = grid
        .iter()
        .map(|&rho| sweep_point(model, rho, options))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepSeries {
        rho_grid: grid.to_vec(),
        points,
    })
}

/// Mean sojourn of an M/M/1 queue, `None` when `lambda >= mu`.
pub fn mm1_wait(lambda: f64, mu: f64) -> Option<f64> {
    (lambda < mu).then(|| 1.0 / (mu - lambda))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DedicatedPair {
    pub good: usize,
    pub agent: usize,
    /// `None` when the pair on its own is unstable.
    pub wait: Option<f64>,
}

/// Mean waits when each listed agent type is served only by its paired good
/// type, as independent M/M/1 queues.
pub fn dedicated_baseline(
    model: &MatchingModel,
    pairing: &[(usize, usize)],
) -> Result<Vec<DedicatedPair>, ModelError> {
    let mut goods = GoodSet::EMPTY;
    let mut agents = AgentSet::EMPTY;
    pairing
        .iter()
        .map(|&(good, agent)| {
            if good >= model.n_goods() {
                return Err(ModelError::IndexOutOfRange {
                    side: Side::Good,
                    index: good,
                });
            }
            if agent >= model.n_agents() {
                return Err(ModelError::IndexOutOfRange {
                    side: Side::Agent,
                    index: agent,
                });
            }
            if !model.compatible(good, agent) {
                return Err(ModelError::NotAnEdge {
                    good: model.good_name(good).into(),
                    agent: model.agent_name(agent).into(),
                });
            }
            if goods.contains(good) {
                return Err(ModelError::DuplicateType {
                    name: model.good_name(good).into(),
                });
            }
            if agents.contains(agent) {
                return Err(ModelError::DuplicateType {
                    name: model.agent_name(agent).into(),
                });
            }
            goods.insert(good);
            agents.insert(agent);
            Ok(DedicatedPair {
                good,
                agent,
                wait: mm1_wait(model.lambda(agent), model.mu(good)),
            })
        })
        .collect()
}
