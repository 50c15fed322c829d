use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::queue::{StepEvent, UnmatchedList};
use super::sequence::{exponential, Item, ItemSampler};
use crate::error::SimError;
use crate::math;
use crate::model::MatchingModel;
use crate::pairs::PairMap;

pub const DEFAULT_BATCHES: usize = 50;

/// Item draws use stream 0 of the seeded generator, arrival clocks stream 1,
/// so the item sequence does not depend on whether times are observed.
const CLOCK_STREAM: u64 = 1;

/// A directed FCFS matching run from the empty state.
#[derive(Debug, Clone)]
pub struct Simulation<'m> {
    model: &'m MatchingModel,
    sampler: ItemSampler,
    items: ChaCha8Rng,
    clock: ChaCha8Rng,
    queue: UnmatchedList,
    index: u64,
    time: f64,
}

impl<'m> Simulation<'m> {
    pub fn new(model: &'m MatchingModel, seed: u64) -> Self {
        let items = ChaCha8Rng::seed_from_u64(seed);
        let mut clock = ChaCha8Rng::seed_from_u64(seed);
        clock.set_stream(CLOCK_STREAM);
        Self {
            model,
            sampler: ItemSampler::new(model),
            items,
            clock,
            queue: UnmatchedList::new(model.n_agents()),
            index: 0,
            time: 0.0,
        }
    }

    /// Draws and processes the next item; returns it with its position.
    pub fn step(&mut self) -> (u64, Item, StepEvent) {
        let item = self.sampler.sample(&mut self.items);
        self.index += 1;
        self.time += exponential(&mut self.clock, self.model.total_rate());
        let event = self.queue.step(self.model, item, self.index, self.time);
        (self.index, item, event)
    }

    pub fn queue(&self) -> &UnmatchedList {
        &self.queue
    }

    /// Position of the last processed item (0 before the first step).
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn time(&self) -> f64 {
        self.time
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub events: u64,
    pub seed: u64,
    pub burn_in: u64,
    pub batches: usize,
}

impl SimConfig {
    /// Default burn-in and batch count.
    pub fn new(events: u64, seed: u64) -> Self {
        Self {
            events,
            seed,
            burn_in: default_burn_in(events),
            batches: DEFAULT_BATCHES,
        }
    }

    pub fn with_burn_in(mut self, burn_in: u64) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_batches(mut self, batches: usize) -> Self {
        self.batches = batches;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.burn_in >= self.events {
            return Err(SimError::BurnInTooLarge {
                events: self.events,
                burn_in: self.burn_in,
            });
        }
        if self.batches < 2 || (self.events - self.burn_in) < self.batches as u64 {
            return Err(SimError::TooFewBatches(self.batches));
        }
        Ok(())
    }
}

/// 1% of the run, at least 10^4 events, and never more than half the run.
pub fn default_burn_in(events: u64) -> u64 {
    (events / 100).max(10_000).min(events / 2)
}

/// Raw counts of one batch. Pair-indexed vectors are good-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchCounts {
    pub events: u64,
    pub agent_arrivals: Vec<u64>,
    pub good_arrivals: Vec<u64>,
    pub matches: Vec<u64>,
    pub losses: Vec<u64>,
    pub delay_sum: Vec<u64>,
    pub delay_square_sum: Vec<u64>,
    pub wait_sum: Vec<f64>,
    pub wait_square_sum: Vec<f64>,
    /// Steps after which no agent was waiting.
    pub empty: u64,
}

impl BatchCounts {
    fn new(n_agents: usize, n_goods: usize) -> Self {
        let pairs = n_agents * n_goods;
        Self {
            events: 0,
            agent_arrivals: vec![0; n_agents],
            good_arrivals: vec![0; n_goods],
            matches: vec![0; pairs],
            losses: vec![0; n_goods],
            delay_sum: vec![0; pairs],
            delay_square_sum: vec![0; pairs],
            wait_sum: vec![0.0; pairs],
            wait_square_sum: vec![0.0; pairs],
            empty: 0,
        }
    }

    fn merge(&mut self, o: &BatchCounts) {
        fn add<T: Copy + core::ops::AddAssign>(a: &mut [T], b: &[T]) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += *y);
        }
        self.events += o.events;
        add(&mut self.agent_arrivals, &o.agent_arrivals);
        add(&mut self.good_arrivals, &o.good_arrivals);
        add(&mut self.matches, &o.matches);
        add(&mut self.losses, &o.losses);
        add(&mut self.delay_sum, &o.delay_sum);
        add(&mut self.delay_square_sum, &o.delay_square_sum);
        add(&mut self.wait_sum, &o.wait_sum);
        add(&mut self.wait_square_sum, &o.wait_square_sum);
        self.empty += o.empty;
    }
}

/// Post-burn-in counts of a simulation, split into batches.
#[derive(Debug, Clone, PartialEq)]
pub struct SimStats {
    pub n_agents: usize,
    pub n_goods: usize,
    pub config: SimConfig,
    pub batches: Vec<BatchCounts>,
    /// Per-batch counts of steps after which the waiting types showed this
    /// first-appearance order. The empty order is not listed; see
    /// [`BatchCounts::empty`].
    pub occupancy: BTreeMap<Vec<usize>, Vec<u64>>,
}

/// Simulates `config.events` items from the empty state.
pub fn run(model: &MatchingModel, config: &SimConfig) -> Result<SimStats, SimError> {
    config.validate()?;
    let (ni, nj) = (model.n_agents(), model.n_goods());
    let mut sim = Simulation::new(model, config.seed);
    for _ in 0..config.burn_in {
        sim.step();
    }
    let measured = config.events - config.burn_in;
    let nb = config.batches as u64;
    let mut batches = vec![BatchCounts::new(ni, nj); config.batches];
    let mut occupancy: BTreeMap<Vec<usize>, Vec<u64>> = BTreeMap::new();
    let mut order = Vec::with_capacity(ni);
    for k in 0..measured {
        let b = ((k as u128 * nb as u128) / measured as u128) as usize;
        let batch = &mut batches[b];
        let (_, item, event) = sim.step();
        batch.events += 1;
        match item {
            Item::Agent(a) => batch.agent_arrivals[a] += 1,
            Item::Good(g) => batch.good_arrivals[g] += 1,
        }
        match event {
            StepEvent::Queued { .. } => {}
            StepEvent::Lost { good } => batch.losses[good] += 1,
            StepEvent::Matched {
                good,
                agent,
                delay,
                wait,
                ..
            } => {
                let p = good * ni + agent;
                batch.matches[p] += 1;
                batch.delay_sum[p] += delay;
                batch.delay_square_sum[p] += delay * delay;
                batch.wait_sum[p] += wait;
                batch.wait_square_sum[p] += wait * wait;
            }
        }
        if sim.queue().is_empty() {
            batch.empty += 1;
        } else {
            sim.queue().first_appearances_into(&mut order);
            match occupancy.get_mut(order.as_slice()) {
                Some(counts) => counts[b] += 1,
                None => {
                    let mut counts = vec![0; config.batches];
                    counts[b] = 1;
                    occupancy.insert(order.clone(), counts);
                }
            }
        }
    }
    Ok(SimStats {
        n_agents: ni,
        n_goods: nj,
        config: *config,
        batches,
        occupancy,
    })
}

/// A point estimate with its batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// `(value - reference) / std_error`; infinite when the error is zero
    /// and the values differ.
    pub fn z_score(&self, reference: f64) -> f64 {
        let d = self.value - reference;
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

/// Overall ratio with standard error from the spread of batch ratios.
fn ratio(parts: impl Iterator<Item = (f64, f64)> + Clone) -> Option<Estimate> {
    let (num, den) = parts
        .clone()
        .fold((0.0, 0.0), |(a, b), (n, d)| (a + n, b + d));
    if den <= 0.0 {
        return None;
    }
    let value = num / den;
    let per_batch: Vec<f64> = parts.filter(|p| p.1 > 0.0).map(|(n, d)| n / d).collect();
    Some(Estimate {
        value,
        std_error: batch_error(&per_batch),
    })
}

fn batch_error(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::INFINITY;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    math::sqrt(ss / (n - 1) as f64 / n as f64)
}

/// Mean and variance of a per-pair observable with batch-means errors.
fn moments(parts: impl Iterator<Item = (f64, f64, f64)> + Clone) -> Option<(Estimate, Estimate)> {
    let (n, s, q) = parts
        .clone()
        .fold((0.0, 0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1, a.2 + p.2));
    if n < 2.0 {
        return None;
    }
    let mean = s / n;
    let var = (q - s * s / n) / (n - 1.0);
    let mut means = Vec::new();
    let mut vars = Vec::new();
    for (bn, bs, bq) in parts {
        if bn >= 2.0 {
            means.push(bs / bn);
            vars.push((bq - bs * bs / bn) / (bn - 1.0));
        }
    }
    Some((
        Estimate {
            value: mean,
            std_error: batch_error(&means),
        },
        Estimate {
            value: var,
            std_error: batch_error(&vars),
        },
    ))
}

/// Empirical counterparts of the analytic quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimates {
    /// Fraction of items that are agents.
    pub agent_fraction: Estimate,
    /// Fraction of items of each category (agents, then goods).
    pub category_fraction: Vec<Estimate>,
    /// Long-run fraction of steps with no waiting agent.
    pub b: Estimate,
    /// Fraction of goods matched as each pair.
    pub rates: PairMap<Estimate>,
    pub loss: Vec<Estimate>,
    pub total_loss: Estimate,
    pub delay_mean: PairMap<Estimate>,
    pub delay_var: PairMap<Estimate>,
    pub wait_mean: PairMap<Estimate>,
    pub wait_var: PairMap<Estimate>,
    /// First-appearance orders with the fraction of steps spent in them.
    pub occupancy: Vec<(Vec<usize>, Estimate)>,
}

impl SimStats {
    pub fn measured_events(&self) -> u64 {
        self.batches.iter().map(|b| b.events).sum()
    }

    pub fn total(&self) -> BatchCounts {
        let mut t = BatchCounts::new(self.n_agents, self.n_goods);
        for b in &self.batches {
            t.merge(b);
        }
        t
    }

    /// Adds another replication batch by batch.
    pub fn merge(&mut self, other: &SimStats) -> Result<(), SimError> {
        if self.n_agents != other.n_agents
            || self.n_goods != other.n_goods
            || self.batches.len() != other.batches.len()
        {
            return Err(SimError::ShapeMismatch);
        }
        for (a, b) in self.batches.iter_mut().zip(&other.batches) {
            a.merge(b);
        }
        for (order, counts) in &other.occupancy {
            let mine = self
                .occupancy
                .entry(order.clone())
                .or_insert_with(|| vec![0; counts.len()]);
            mine.iter_mut().zip(counts).for_each(|(x, y)| *x += y);
        }
        Ok(())
    }

    pub fn estimates(&self, model: &MatchingModel) -> SimEstimates {
        let ni = self.n_agents;
        let bs = &self.batches;
        let per_event = |f: &dyn Fn(&BatchCounts) -> u64| {
            ratio(bs.iter().map(|b| (f(b) as f64, b.events as f64))).expect("events were measured")
        };
        let goods = |b: &BatchCounts| b.good_arrivals.iter().sum::<u64>() as f64;

        let agent_fraction = per_event(&|b| b.agent_arrivals.iter().sum());
        let category_fraction = (0..ni)
            .map(|a| per_event(&|b| b.agent_arrivals[a]))
            .chain((0..self.n_goods).map(|g| per_event(&|b| b.good_arrivals[g])))
            .collect();
        let b = per_event(&|b| b.empty);
        let rates = PairMap::from_edges(model, |g, a| {
            ratio(bs.iter().map(|b| (b.matches[g * ni + a] as f64, goods(b))))
        });
        let loss = (0..self.n_goods)
            .map(|g| {
                ratio(bs.iter().map(|b| (b.losses[g] as f64, goods(b)))).unwrap_or(Estimate {
                    value: f64::NAN,
                    std_error: f64::INFINITY,
                })
            })
            .collect();
        let total_loss = ratio(
            bs.iter()
                .map(|b| (b.losses.iter().sum::<u64>() as f64, goods(b))),
        )
        .unwrap_or(Estimate {
            value: f64::NAN,
            std_error: f64::INFINITY,
        });
        let delay = PairMap::from_edges(model, |g, a| {
            let p = g * ni + a;
            moments(bs.iter().map(|b| {
                (
                    b.matches[p] as f64,
                    b.delay_sum[p] as f64,
                    b.delay_square_sum[p] as f64,
                )
            }))
        });
        let wait = PairMap::from_edges(model, |g, a| {
            let p = g * ni + a;
            moments(
                bs.iter()
                    .map(|b| (b.matches[p] as f64, b.wait_sum[p], b.wait_square_sum[p])),
            )
        });
        let occupancy = self
            .occupancy
            .iter()
            .map(|(order, counts)| {
                let e = ratio(
                    counts
                        .iter()
                        .zip(bs)
                        .map(|(&c, b)| (c as f64, b.events as f64)),
                )
                .expect("events were measured");
                (order.clone(), e)
            })
            .collect();
        SimEstimates {
            agent_fraction,
            category_fraction,
            b,
            rates,
            loss,
            total_loss,
            delay_mean: delay.map(|m| m.0),
            delay_var: delay.map(|m| m.1),
            wait_mean: wait.map(|m| m.0),
            wait_var: wait.map(|m| m.1),
            occupancy,
        }
    }
}
