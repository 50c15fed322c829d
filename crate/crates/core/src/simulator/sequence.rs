use alloc::vec::Vec;

use rand::Rng;

use crate::math;
use crate::model::MatchingModel;

/// One element of the arrival sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Item {
    Agent(usize),
    Good(usize),
}

impl Item {
    pub fn is_agent(self) -> bool {
        matches!(self, Item::Agent(_))
    }

    pub fn type_index(self) -> usize {
        match self {
            Item::Agent(i) | Item::Good(i) => i,
        }
    }

    /// Category index in `0..I+J`: agents first, then goods.
    pub fn category(self, n_agents: usize) -> usize {
        match self {
            Item::Agent(i) => i,
            Item::Good(j) => n_agents + j,
        }
    }
}

/// Draws i.i.d. items: an agent with probability `lambda_bar / (lambda_bar +
/// mu_bar)`, then its type from `alpha`; otherwise a good with type from
/// `beta`. Each item consumes exactly two uniforms, kind first.
#[derive(Debug, Clone)]
pub struct ItemSampler {
    agent_probability: f64,
    alpha_cdf: Vec<f64>,
    beta_cdf: Vec<f64>,
}

impl ItemSampler {
    pub fn new(model: &MatchingModel) -> Self {
        let cdf = |w: &[f64]| {
            let mut acc = 0.0;
            let mut out: Vec<f64> = w
                .iter()
                .map(|x| {
                    acc += x;
                    acc
                })
                .collect();
            // guard against round-off leaving the last bucket short
            if let Some(last) = out.last_mut() {
                *last = f64::INFINITY;
            }
            out
        };
        Self {
            agent_probability: model.lambda_bar() / model.total_rate(),
            alpha_cdf: cdf(model.alphas()),
            beta_cdf: cdf(model.betas()),
        }
    }

    pub fn agent_probability(&self) -> f64 {
        self.agent_probability
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Item {
        let kind: f64 = rng.random();
        let u: f64 = rng.random();
        if kind < self.agent_probability {
            Item::Agent(pick(&self.alpha_cdf, u))
        } else {
            Item::Good(pick(&self.beta_cdf, u))
        }
    }

    /// Category probabilities in the order of [`Item::category`].
    pub fn category_probabilities(&self, model: &MatchingModel) -> Vec<f64> {
        let pa = self.agent_probability;
        model
            .alphas()
            .iter()
            .map(|a| pa * a)
            .chain(model.betas().iter().map(|b| (1.0 - pa) * b))
            .collect()
    }
}

fn pick(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

/// Draws one item of the sequence.
pub fn generate_item<R: Rng + ?Sized>(rng: &mut R, sampler: &ItemSampler) -> Item {
    sampler.sample(rng)
}

/// Exponential variate with the given rate.
pub(crate) fn exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -math::ln(1.0 - u) / rate
}
