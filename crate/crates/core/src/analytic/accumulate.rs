//! The single-pass accumulator behind rates, delay moments and wait moments.

use alloc::vec;
use alloc::vec::Vec;

use super::enumerate::{Accumulator, PermutationTerm, TermVisitor};
use super::RateReport;
use crate::delays::{DelayReport, Moments};
use crate::model::MatchingModel;
use crate::pairs::PairMap;
use crate::sum::CompensatedSum;

/// Sum of term weights only; `1 / value()` is the normalizing constant.
#[derive(Debug, Clone, Copy)]
pub struct WeightSum(CompensatedSum);

impl Default for WeightSum {
    fn default() -> Self {
        // the empty state contributes 1
        Self(CompensatedSum::starting_at(1.0))
    }
}

impl WeightSum {
    pub fn value(&self) -> f64 {
        self.0.value()
    }
}

impl TermVisitor for WeightSum {
    #[inline]
    fn visit(&mut self, term: &PermutationTerm<'_>) {
        self.0 += term.weight;
    }
}

impl Accumulator for WeightSum {
    fn merge(&mut self, other: Self) {
        // `other` starts at 1 as well
        self.0 += other.0;
        self.0 += -1.0;
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Cell {
    rate: CompensatedSum,
    delay_mean: CompensatedSum,
    delay_square: CompensatedSum,
    delay_var: CompensatedSum,
    wait_mean: CompensatedSum,
    wait_square: CompensatedSum,
    wait_var: CompensatedSum,
}

impl Cell {
    fn merge(&mut self, o: &Cell) {
        self.rate += o.rate;
        self.delay_mean += o.delay_mean;
        self.delay_square += o.delay_square;
        self.delay_var += o.delay_var;
        self.wait_mean += o.wait_mean;
        self.wait_square += o.wait_square;
        self.wait_var += o.wait_var;
    }
}

/// Suffix sums over stages `h >= l` of one term.
#[derive(Debug, Clone, Copy, Default)]
struct Tail {
    delay_mean: f64,
    delay_var: f64,
    wait_mean: f64,
    wait_var: f64,
}

/// Per-pair weighted sums for every quantity derived from one enumeration.
///
/// Branch-local instances are merged with [`Accumulator::merge`]; the result
/// is independent of how the branches were scheduled as long as the merge
/// order is fixed.
#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    n_agents: usize,
    total_rate: f64,
    moments: bool,
    weights: WeightSum,
    cells: Vec<Cell>,
    tail: Vec<Tail>,
}

impl MetricsAccumulator {
    /// `moments = false` accumulates only what the rates need.
    pub fn new(model: &MatchingModel, moments: bool) -> Self {
        Self {
            n_agents: model.n_agents(),
            total_rate: model.total_rate(),
            moments,
            weights: WeightSum::default(),
            cells: vec![Cell::default(); model.n_goods() * model.n_agents()],
            tail: vec![Tail::default(); model.n_agents() + 1],
        }
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.value()
    }

    /// Scales the sums into reports. Delay fields are present only when
    /// moments were accumulated.
    pub fn finish(&self, model: &MatchingModel) -> (RateReport, Option<DelayReport>) {
        let b = 1.0 / self.weight_sum();
        let scale: Vec<f64> = (0..model.n_goods())
            .map(|j| b * model.mu(j) / model.mu_bar())
            .collect();
        let cell = |g: usize, a: usize| &self.cells[g * self.n_agents + a];

        let rates = PairMap::from_edges(model, |g, a| Some(scale[g] * cell(g, a).rate.value()));
        let rates = RateReport::from_rates(model, b, rates);
        if !self.moments {
            return (rates, None);
        }

        let conditional = |c: &Cell, wait: bool| {
            let (mean, square, var) = if wait {
                (&c.wait_mean, &c.wait_square, &c.wait_var)
            } else {
                (&c.delay_mean, &c.delay_square, &c.delay_var)
            };
            let weight = c.rate.value();
            if !(weight > 0.0) {
                return None;
            }
            let e = mean.value() / weight;
            let e2 = square.value() / weight;
            let v = var.value() / weight;
            Some(Moments {
                mean: e,
                variance: (v + e2 - e * e).max(0.0),
            })
        };
        let pair = PairMap::from_edges(model, |g, a| conditional(cell(g, a), false));
        let wait_pair = PairMap::from_edges(model, |g, a| conditional(cell(g, a), true));
        let delays = DelayReport::from_pairs(model, &rates, pair, wait_pair);
        (rates, Some(delays))
    }
}

impl TermVisitor for MetricsAccumulator {
    fn visit(&mut self, term: &PermutationTerm<'_>) {
        let w = term.weight;
        self.weights.visit(term);
        let k = term.len();
        if self.moments {
            self.tail[k] = Tail::default();
            for l in (0..k).rev() {
                let gap = term.gap(l);
                let p = gap / self.total_rate;
                let next = self.tail[l + 1];
                self.tail[l] = Tail {
                    delay_mean: next.delay_mean + 1.0 / p,
                    delay_var: next.delay_var + (1.0 - p) / (p * p),
                    wait_mean: next.wait_mean + 1.0 / gap,
                    wait_var: next.wait_var + 1.0 / (gap * gap),
                };
            }
        }
        for l in 0..k {
            let agent = term.order[l];
            let tail = self.tail[l];
            for good in term.new_goods[l] {
                let cell = &mut self.cells[good * self.n_agents + agent];
                cell.rate += w;
                if self.moments {
                    cell.delay_mean += w * tail.delay_mean;
                    cell.delay_square += w * tail.delay_mean * tail.delay_mean;
                    cell.delay_var += w * tail.delay_var;
                    cell.wait_mean += w * tail.wait_mean;
                    cell.wait_square += w * tail.wait_mean * tail.wait_mean;
                    cell.wait_var += w * tail.wait_var;
                }
            }
        }
    }
}

impl Accumulator for MetricsAccumulator {
    fn merge(&mut self, other: Self) {
        self.weights.merge(other.weights);
        for (mine, theirs) in self.cells.iter_mut().zip(&other.cells) {
            mine.merge(theirs);
        }
    }
}
