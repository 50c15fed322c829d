//! Shared fixtures and independent oracles for the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use fcfs_match_core::model::SubsetsByCardinality;
use fcfs_match_core::{MatchingModel, ModelSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn spec(
    agents: &[(&str, f64)],
    goods: &[(&str, f64)],
    edges: &[(&str, &str)],
    lambda_bar: f64,
    mu_bar: f64,
) -> ModelSpec {
    ModelSpec {
        agents: agents.iter().map(|(n, a)| (n.to_string(), *a)).collect(),
        goods: goods.iter().map(|(n, b)| (n.to_string(), *b)).collect(),
        edges: edges
            .iter()
            .map(|(g, a)| (g.to_string(), a.to_string()))
            .collect(),
        lambda_bar,
        mu_bar,
    }
}

/// Three agent and three good types, each agent compatible with two goods,
/// at traffic intensity 0.7.
pub fn three_by_three() -> MatchingModel {
    MatchingModel::new(spec(
        &[("c1", 0.3), ("c2", 0.5), ("c3", 0.2)],
        &[("s1", 0.3), ("s2", 0.3), ("s3", 0.4)],
        &[
            ("s1", "c1"),
            ("s1", "c2"),
            ("s2", "c1"),
            ("s2", "c3"),
            ("s3", "c2"),
            ("s3", "c3"),
        ],
        0.7,
        1.0,
    ))
    .unwrap()
}

pub fn single_pair(lambda: f64, mu: f64) -> MatchingModel {
    MatchingModel::new(spec(
        &[("c", 1.0)],
        &[("s", 1.0)],
        &[("s", "c")],
        lambda,
        mu,
    ))
    .unwrap()
}

pub fn index(m: &MatchingModel, good: &str, agent: &str) -> (usize, usize) {
    (m.good_index(good).unwrap(), m.agent_index(agent).unwrap())
}

fn frequencies(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let mut out: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // make the sum exact up to one rounding
    let rest: f64 = out[1..].iter().sum();
    out[0] = 1.0 - rest;
    out
}

/// A random valid model with `n_agents` x `n_goods` types and the given edge
/// set (`None` draws edges at random, every agent keeping at least one).
pub fn random_model_with_edges(
    rng: &mut ChaCha8Rng,
    n_agents: usize,
    n_goods: usize,
    edges: Option<&[(usize, usize)]>,
    lambda_bar: f64,
) -> MatchingModel {
    let edges: Vec<(usize, usize)> = match edges {
        Some(e) => e.to_vec(),
        None => {
            let mut e = Vec::new();
            for a in 0..n_agents {
                let forced = rng.random_range(0..n_goods);
                for g in 0..n_goods {
                    if g == forced || rng.random::<f64>() < 0.4 {
                        e.push((g, a));
                    }
                }
            }
            e
        }
    };
    let agents: Vec<(String, f64)> = frequencies(rng, n_agents)
        .into_iter()
        .enumerate()
        .map(|(i, a)| (format!("c{}", i + 1), a))
        .collect();
    let goods: Vec<(String, f64)> = frequencies(rng, n_goods)
        .into_iter()
        .enumerate()
        .map(|(j, b)| (format!("s{}", j + 1), b))
        .collect();
    MatchingModel::new(ModelSpec {
        edges: edges
            .iter()
            .map(|&(g, a)| (goods[g].0.clone(), agents[a].0.clone()))
            .collect(),
        agents,
        goods,
        lambda_bar,
        mu_bar: 1.0,
    })
    .unwrap()
}

/// A random stable model: traffic is a random fraction of the largest
/// stable intensity.
pub fn random_stable_model(rng: &mut ChaCha8Rng, n_agents: usize, n_goods: usize) -> MatchingModel {
    let m = random_model_with_edges(rng, n_agents, n_goods, None, 0.5);
    let limit = m.max_stable_rho().value;
    let rho = limit * (0.2 + 0.75 * rng.random::<f64>());
    let mu_bar = 0.5 + 1.5 * rng.random::<f64>();
    let mut s = m.to_spec();
    s.mu_bar = mu_bar;
    s.lambda_bar = rho * mu_bar;
    MatchingModel::new(s).unwrap()
}

/// Largest `lambda_C / mu_S(C)` over nonempty agent subsets.
pub fn max_load(m: &MatchingModel) -> f64 {
    SubsetsByCardinality::new(m.n_agents())
        .map(|c| m.lambda_of(c) / m.mu_of(m.goods_of_set(c)))
        .fold(0.0, f64::max)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stationary solution of the first-appearance chain truncated to states
/// with at most `cap` agents beyond the first appearances.
///
/// States are `(C_1, n_1, .., C_k, n_k)`. Within block `l` the `n_l` agents
/// are taken to be i.i.d. over `{C_1..C_l}` with probabilities proportional
/// to their arrival rates; a good removes the oldest compatible agent, which
/// is always a first appearance, and the next occurrence of that type is
/// located by geometric search through the following blocks.
pub struct TruncatedChain {
    pub states: Vec<(Vec<usize>, Vec<u32>)>,
    pub pi: Vec<f64>,
    pub sweeps: usize,
}

impl TruncatedChain {
    pub fn solve(m: &MatchingModel, cap: u32) -> Self {
        let states = enumerate_states(m.n_agents(), cap);
        let lookup: HashMap<(Vec<usize>, Vec<u32>), usize> = states
            .iter()
            .cloned()
            .enumerate()
            .map(|(k, s)| (s, k))
            .collect();
        let total = m.total_rate();

        // incoming[j] = (i, P(i -> j)) for i != j; stay[j] = P(j -> j)
        let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); states.len()];
        let mut stay = vec![0.0; states.len()];
        for (from, (order, gaps)) in states.iter().enumerate() {
            let mut out: Vec<(usize, f64)> = Vec::new();
            let mut add = |o: Vec<usize>, g: Vec<u32>, p: f64| {
                if p == 0.0 {
                    return;
                }
                let to = lookup[&(o, g)];
                out.push((to, p));
            };
            let used_gaps: u32 = gaps.iter().sum();
            for a in 0..m.n_agents() {
                let p = m.lambda(a) / total;
                if order.contains(&a) {
                    if used_gaps < cap {
                        let mut g = gaps.clone();
                        *g.last_mut().unwrap() += 1;
                        add(order.clone(), g, p);
                    } else {
                        add(order.clone(), gaps.clone(), p);
                    }
                } else {
                    let mut o = order.clone();
                    o.push(a);
                    let mut g = gaps.clone();
                    g.push(0);
                    add(o, g, p);
                }
            }
            for s in 0..m.n_goods() {
                let p = m.mu(s) / total;
                match order.iter().position(|&c| m.compatible(s, c)) {
                    None => add(order.clone(), gaps.clone(), p),
                    Some(l) => {
                        for (o, g, q) in removal(m, order, gaps, l) {
                            add(o, g, p * q);
                        }
                    }
                }
            }
            for (to, p) in out {
                if to == from {
                    stay[from] += p;
                } else {
                    incoming[to].push((from, p));
                }
            }
        }

        // Gauss-Seidel on pi = pi P
        let n = states.len();
        let mut pi = vec![1.0 / n as f64; n];
        let mut sweeps = 0;
        loop {
            sweeps += 1;
            let mut change: f64 = 0.0;
            for j in 0..n {
                let inflow: f64 = incoming[j].iter().map(|&(i, p)| pi[i] * p).sum();
                let next = inflow / (1.0 - stay[j]);
                change = change.max((next - pi[j]).abs());
                pi[j] = next;
            }
            let norm: f64 = pi.iter().sum();
            pi.iter_mut().for_each(|x| *x /= norm);
            if change < 1e-15 || sweeps > 200_000 {
                break;
            }
        }
        Self { states, pi, sweeps }
    }

    pub fn empty_probability(&self) -> f64 {
        self.states
            .iter()
            .zip(&self.pi)
            .filter(|((o, _), _)| o.is_empty())
            .map(|(_, p)| p)
            .sum()
    }

    /// Probability of each first-appearance order.
    pub fn order_probabilities(&self) -> HashMap<Vec<usize>, f64> {
        let mut out = HashMap::new();
        for ((o, _), p) in self.states.iter().zip(&self.pi) {
            *out.entry(o.clone()).or_insert(0.0) += p;
        }
        out
    }

    /// Matching rates (good-major `[good][agent]`) and losses: a good of type
    /// `s_j` arriving to a state takes the first compatible type in order.
    pub fn rates(&self, m: &MatchingModel) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rates = vec![vec![0.0; m.n_agents()]; m.n_goods()];
        let mut loss = vec![0.0; m.n_goods()];
        for ((order, _), p) in self.states.iter().zip(&self.pi) {
            for s in 0..m.n_goods() {
                let share = p * m.mu(s) / m.mu_bar();
                match order.iter().find(|&&c| m.compatible(s, c)) {
                    Some(&c) => rates[s][c] += share,
                    None => loss[s] += share,
                }
            }
        }
        (rates, loss)
    }
}

/// Outcomes of removing the first `C_l` agent: (order, gaps, probability).
fn removal(
    m: &MatchingModel,
    order: &[usize],
    gaps: &[u32],
    l: usize,
) -> Vec<(Vec<usize>, Vec<u32>, f64)> {
    let removed = order[l];
    let prefix_rate = |h: usize| -> f64 { order[..=h].iter().map(|&c| m.lambda(c)).sum() };
    let mut out = Vec::new();
    // probability that no occurrence of `removed` was found before block h
    let mut missed = 1.0;
    for h in l..order.len() {
        let q = m.lambda(removed) / prefix_rate(h);
        let n = gaps[h];
        for t in 1..=n {
            let p = missed * (1.0 - q).powi(t as i32 - 1) * q;
            if p == 0.0 {
                continue;
            }
            // blocks l..h-1 merge into block l-1; `removed` reappears in block h
            let mut o: Vec<usize> = order[..l].to_vec();
            let mut g: Vec<u32> = gaps[..l].to_vec();
            if h == l {
                if l > 0 {
                    g[l - 1] += t - 1;
                }
            } else {
                if l > 0 {
                    g[l - 1] += gaps[l];
                }
                for k in l + 1..h {
                    o.push(order[k]);
                    g.push(gaps[k]);
                }
                o.push(order[h]);
                g.push(t - 1);
            }
            o.push(removed);
            g.push(n - t);
            o.extend_from_slice(&order[h + 1..]);
            g.extend_from_slice(&gaps[h + 1..]);
            out.push((o, g, p));
        }
        missed *= (1.0 - q).powi(n as i32);
        if missed == 0.0 {
            return out;
        }
    }
    // no further occurrence: the type disappears
    let mut o: Vec<usize> = order[..l].to_vec();
    let mut g: Vec<u32> = gaps[..l].to_vec();
    if l > 0 {
        g[l - 1] += gaps[l];
    }
    o.extend_from_slice(&order[l + 1..]);
    g.extend_from_slice(&gaps[l + 1..]);
    out.push((o, g, missed));
    out
}

fn enumerate_states(n_agents: usize, cap: u32) -> Vec<(Vec<usize>, Vec<u32>)> {
    fn orders(n: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(prefix.clone());
        for c in 0..n {
            if !prefix.contains(&c) {
                prefix.push(c);
                orders(n, prefix, out);
                prefix.pop();
            }
        }
    }
    fn gap_vectors(k: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for n in 0..=budget {
            prefix.push(n);
            gap_vectors(k, budget - n, prefix, out);
            prefix.pop();
        }
    }
    let mut all_orders = Vec::new();
    orders(n_agents, &mut Vec::new(), &mut all_orders);
    let mut states = Vec::new();
    for o in all_orders {
        let mut gs = Vec::new();
        gap_vectors(o.len(), cap, &mut Vec::new(), &mut gs);
        for g in gs {
            states.push((o.clone(), g));
        }
    }
    states
}
