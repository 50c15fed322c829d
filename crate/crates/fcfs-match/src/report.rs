//! JSON and CSV renderings of every report. All numbers go through
//! [`crate::number::format_number`].

use fcfs_match_core::delays::Moments;
use fcfs_match_core::limits::SweepSeries;
use fcfs_match_core::simulator::{Estimate, SimStats};
use fcfs_match_core::{DelayReport, MatchingModel, PairMap, RateReport};
use serde_json::{json, Map, Value};

use crate::number::{format_number, round_number};
use crate::CliError;

/// Marker used in the agent column for lost goods.
pub const LOST: &str = "LOST";

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round_number(x)).map_or(Value::Null, Value::Number)
}

fn csv_text(rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new());
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
}

/// `{good: {agent: value}}` over the edges.
fn by_good<T>(model: &MatchingModel, map: &PairMap<T>, f: impl Fn(&T) -> Value) -> Value {
    let mut out = Map::new();
    for g in 0..model.n_goods() {
        let row: Map<String, Value> = map
            .good_row(g)
            .map(|(a, v)| (model.agent_name(a).to_string(), f(v)))
            .collect();
        out.insert(model.good_name(g).to_string(), Value::Object(row));
    }
    Value::Object(out)
}

/// `{agent: {good: value}}` over the edges.
fn by_agent<T>(model: &MatchingModel, map: &PairMap<T>, f: impl Fn(&T) -> Value) -> Value {
    let mut out = Map::new();
    for a in 0..model.n_agents() {
        let col: Map<String, Value> = map
            .agent_column(a)
            .map(|(g, v)| (model.good_name(g).to_string(), f(v)))
            .collect();
        out.insert(model.agent_name(a).to_string(), Value::Object(col));
    }
    Value::Object(out)
}

fn per_good(model: &MatchingModel, values: &[f64]) -> Value {
    let out: Map<String, Value> = values
        .iter()
        .enumerate()
        .map(|(g, v)| (model.good_name(g).to_string(), num(*v)))
        .collect();
    Value::Object(out)
}

pub fn rates_json(model: &MatchingModel, r: &RateReport) -> Value {
    json!({
        "b": num(r.b),
        "rates": by_good(model, &r.rates, |v| num(*v)),
        "loss": per_good(model, &r.loss),
        "eta": by_good(model, &r.eta, |v| num(*v)),
        "eta_lost": per_good(model, &r.eta_lost),
        "theta": by_agent(model, &r.theta, |v| num(*v)),
    })
}

/// `good,agent,rate` rows over the edges, then `good,LOST,rate` rows.
pub fn rates_csv(model: &MatchingModel, r: &RateReport) -> Result<String, CliError> {
    let header = ["good", "agent", "rate"].map(String::from).to_vec();
    let pairs = r.rates.iter().map(|(g, a, v)| {
        vec![
            model.good_name(g).to_string(),
            model.agent_name(a).to_string(),
            format_number(*v),
        ]
    });
    let lost = r.loss.iter().enumerate().map(|(g, v)| {
        vec![
            model.good_name(g).to_string(),
            LOST.to_string(),
            format_number(*v),
        ]
    });
    csv_text(std::iter::once(header).chain(pairs).chain(lost))
}

/// Which moments of a [`DelayReport`] to render.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    /// Delays counted in items.
    Delay,
    /// Waiting times under Poisson arrivals.
    Wait,
}

impl MomentKind {
    fn select(self, d: &DelayReport) -> (&PairMap<Moments>, &[Option<Moments>]) {
        match self {
            MomentKind::Delay => (&d.pair, &d.agent),
            MomentKind::Wait => (&d.wait_pair, &d.wait_agent),
        }
    }
}

fn moments_value(m: &Moments) -> Value {
    json!({ "mean": num(m.mean), "variance": num(m.variance), "std_dev": num(m.std_dev()) })
}

pub fn moments_json(model: &MatchingModel, d: &DelayReport, kind: MomentKind) -> Value {
    let (pair, agent) = kind.select(d);
    let agents: Map<String, Value> = agent
        .iter()
        .enumerate()
        .map(|(a, m)| {
            (
                model.agent_name(a).to_string(),
                m.as_ref().map_or(Value::Null, moments_value),
            )
        })
        .collect();
    json!({ "pairs": by_good(model, pair, moments_value), "agents": agents })
}

/// A `good,agent,mean,variance` table, a blank line, then an
/// `agent,mean,variance` table. Agents that are never matched have empty
/// cells.
pub fn moments_csv(
    model: &MatchingModel,
    d: &DelayReport,
    kind: MomentKind,
) -> Result<String, CliError> {
    let (pair, agent) = kind.select(d);
    let header = ["good", "agent", "mean", "variance"]
        .map(String::from)
        .to_vec();
    let pairs = csv_text(std::iter::once(header).chain(pair.iter().map(|(g, a, m)| {
        vec![
            model.good_name(g).to_string(),
            model.agent_name(a).to_string(),
            format_number(m.mean),
            format_number(m.variance),
        ]
    })))?;
    let header = ["agent", "mean", "variance"].map(String::from).to_vec();
    let agents = csv_text(std::iter::once(header).chain(agent.iter().enumerate().map(
        |(a, m)| {
            let (mean, var) = m.map_or((String::new(), String::new()), |m| {
                (format_number(m.mean), format_number(m.variance))
            });
            vec![model.agent_name(a).to_string(), mean, var]
        },
    )))?;
    Ok(format!("{pairs}\n{agents}"))
}

/// `rho,good,agent,rate,delay_mean,delay_var` rows, with a
/// `rho,good,LOST,rate,,` row per good after the pairs of each point.
pub fn sweep_csv(model: &MatchingModel, s: &SweepSeries) -> Result<String, CliError> {
    let header = ["rho", "good", "agent", "rate", "delay_mean", "delay_var"]
        .map(String::from)
        .to_vec();
    let mut rows = vec![header];
    for p in &s.points {
        let rho = format_number(p.rho);
        for (g, a, r) in p.rates.rates.iter() {
            let d = p.delays.pair.get(g, a);
            rows.push(vec![
                rho.clone(),
                model.good_name(g).to_string(),
                model.agent_name(a).to_string(),
                format_number(*r),
                d.map_or(String::new(), |m| format_number(m.mean)),
                d.map_or(String::new(), |m| format_number(m.variance)),
            ]);
        }
        for (g, l) in p.rates.loss.iter().enumerate() {
            rows.push(vec![
                rho.clone(),
                model.good_name(g).to_string(),
                LOST.to_string(),
                format_number(*l),
                String::new(),
                String::new(),
            ]);
        }
    }
    csv_text(rows)
}

pub fn sweep_json(model: &MatchingModel, s: &SweepSeries) -> Value {
    let points: Vec<Value> = s
        .points
        .iter()
        .map(|p| {
            json!({
                "rho": num(p.rho),
                "rates": rates_json(model, &p.rates),
                "delays": moments_json(model, &p.delays, MomentKind::Delay),
            })
        })
        .collect();
    json!({ "points": points })
}

/// Validation, stability, pooling and maximal-intensity diagnostics.
pub fn validation_json(model: &MatchingModel) -> Value {
    let stability = model.check_stability();
    let max_rho = model.max_stable_rho();
    let witness = stability.witness.map(|set| {
        let agents: Vec<&str> = set.iter().map(|a| model.agent_name(a)).collect();
        let goods: Vec<&str> = model
            .goods_of_set(set)
            .iter()
            .map(|g| model.good_name(g))
            .collect();
        json!({
            "agents": agents,
            "goods": goods,
            "lambda": num(model.lambda_of(set)),
            "mu": num(model.mu_of(model.goods_of_set(set))),
        })
    });
    json!({
        "valid": true,
        "agents": model.n_agents(),
        "goods": model.n_goods(),
        "edges": model.n_edges(),
        "rho": num(model.rho()),
        "stable": stability.stable,
        "witness": witness,
        "crp": model.check_crp(),
        "max_stable_rho": num(max_rho.value),
        "max_stable_rho_proper_subsets": max_rho.proper_min.map_or(Value::Null, num),
    })
}

fn estimate(e: &Estimate) -> Value {
    json!({ "value": num(e.value), "std_error": num(e.std_error) })
}

fn order_names(model: &MatchingModel, order: &[usize]) -> Vec<String> {
    order
        .iter()
        .map(|&a| model.agent_name(a).to_string())
        .collect()
}

/// Raw totals and batch-means estimates of a simulation run.
pub fn sim_json(model: &MatchingModel, stats: &SimStats) -> Value {
    let t = stats.total();
    let e = stats.estimates(model);
    let ni = model.n_agents();
    let named = |names: &[String], counts: &[u64]| -> Value {
        Value::Object(
            names
                .iter()
                .cloned()
                .zip(counts.iter().map(|c| json!(c)))
                .collect(),
        )
    };
    let pair_counts = PairMap::from_edges(model, |g, a| Some(t.matches[g * ni + a]));
    let occupancy: Vec<Value> = e
        .occupancy
        .iter()
        .map(|(order, est)| json!({ "order": order_names(model, order), "probability": estimate(est) }))
        .collect();
    json!({
        "config": {
            "events": stats.config.events,
            "seed": stats.config.seed,
            "burn_in": stats.config.burn_in,
            "batches": stats.config.batches,
        },
        "totals": {
            "events": t.events,
            "agent_arrivals": named(model.agent_names(), &t.agent_arrivals),
            "good_arrivals": named(model.good_names(), &t.good_arrivals),
            "matches": by_good(model, &pair_counts, |c| json!(c)),
            "losses": named(model.good_names(), &t.losses),
            "empty": t.empty,
        },
        "estimates": {
            "agent_fraction": estimate(&e.agent_fraction),
            "b": estimate(&e.b),
            "rates": by_good(model, &e.rates, estimate),
            "loss": Value::Object(
                e.loss.iter().enumerate().map(|(g, l)| (model.good_name(g).to_string(), estimate(l))).collect()
            ),
            "total_loss": estimate(&e.total_loss),
            "delay_mean": by_good(model, &e.delay_mean, estimate),
            "delay_var": by_good(model, &e.delay_var, estimate),
            "wait_mean": by_good(model, &e.wait_mean, estimate),
            "wait_var": by_good(model, &e.wait_var, estimate),
        },
        "occupancy": occupancy,
    })
}

/// One line of the analytic-versus-empirical comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub quantity: String,
    pub analytic: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub z_score: f64,
}

impl Comparison {
    fn new(quantity: String, analytic: f64, e: &Estimate) -> Self {
        Self {
            quantity,
            analytic,
            empirical: e.value,
            std_error: e.std_error,
            z_score: e.z_score(analytic),
        }
    }

    /// NaN scores (nothing observed) count as failures.
    pub fn passes(&self, z_max: f64) -> bool {
        self.z_score.abs() <= z_max
    }
}

/// Smallest first-appearance probability compared against the simulation.
pub const OCCUPANCY_FLOOR: f64 = 1e-4;

/// Pairs every analytic quantity with its simulated estimate. Quantity
/// names are `/`-separated, e.g. `rate/s1/c1` or `pi_y/c2/c1`.
pub fn compare(
    model: &MatchingModel,
    rates: &RateReport,
    delays: &DelayReport,
    stats: &SimStats,
    mut pi_y: impl FnMut(&[usize]) -> f64,
) -> Vec<Comparison> {
    let e = stats.estimates(model);
    let missing = Estimate {
        value: f64::NAN,
        std_error: f64::NAN,
    };
    let mut out = vec![Comparison::new("b".into(), rates.b, &e.b)];
    let name = |g: usize, a: usize| format!("{}/{}", model.good_name(g), model.agent_name(a));
    for (g, a, r) in rates.rates.iter() {
        out.push(Comparison::new(
            format!("rate/{}", name(g, a)),
            *r,
            e.rates.get(g, a).unwrap_or(&missing),
        ));
    }
    for (g, l) in rates.loss.iter().enumerate() {
        out.push(Comparison::new(
            format!("loss/{}", model.good_name(g)),
            *l,
            &e.loss[g],
        ));
    }
    let moment_rows: [(&str, &PairMap<Moments>, &PairMap<Estimate>, bool); 4] = [
        ("delay_mean", &delays.pair, &e.delay_mean, true),
        ("delay_var", &delays.pair, &e.delay_var, false),
        ("wait_mean", &delays.wait_pair, &e.wait_mean, true),
        ("wait_var", &delays.wait_pair, &e.wait_var, false),
    ];
    for (label, analytic, empirical, mean) in moment_rows {
        for (g, a, m) in analytic.iter() {
            let value = if mean { m.mean } else { m.variance };
            let est = empirical.get(g, a).unwrap_or(&missing);
            out.push(Comparison::new(
                format!("{label}/{}", name(g, a)),
                value,
                est,
            ));
        }
    }
    for (order, est) in &e.occupancy {
        let p = pi_y(order);
        if p > OCCUPANCY_FLOOR {
            let label = format!("pi_y/{}", order_names(model, order).join("/"));
            out.push(Comparison::new(label, p, est));
        }
    }
    out
}

/// `quantity,analytic,empirical,stderr,z_score`.
pub fn comparison_csv(rows: &[Comparison]) -> Result<String, CliError> {
    let header = ["quantity", "analytic", "empirical", "stderr", "z_score"]
        .map(String::from)
        .to_vec();
    csv_text(std::iter::once(header).chain(rows.iter().map(|c| {
        vec![
            c.quantity.clone(),
            format_number(c.analytic),
            format_number(c.empirical),
            format_number(c.std_error),
            format_number(c.z_score),
        ]
    })))
}
