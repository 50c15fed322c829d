//! Plain-text matrices in the layout of the worked example.

use std::fmt::Write;

use fcfs_match_core::delays::Moments;
use fcfs_match_core::{DelayReport, MatchingModel, PairMap, RateReport};

use crate::report::MomentKind;

fn width(model: &MatchingModel) -> usize {
    model
        .agent_names()
        .iter()
        .chain(model.good_names())
        .map(|n| n.len())
        .max()
        .unwrap_or(0)
        .max(8)
}

/// Goods as rows, agents as columns; `0` marks incompatible pairs.
fn matrix<T>(
    out: &mut String,
    model: &MatchingModel,
    title: &str,
    map: &PairMap<T>,
    cell: impl Fn(&T) -> String,
    extra: Option<(&str, &dyn Fn(usize) -> String)>,
) {
    let w = width(model);
    let _ = writeln!(out, "{title}");
    let _ = write!(out, "{:w$}", "");
    for a in model.agent_names() {
        let _ = write!(out, " {a:>w$}");
    }
    if let Some((label, _)) = extra {
        let _ = write!(out, " {label:>w$}");
    }
    out.push('\n');
    for g in 0..model.n_goods() {
        let _ = write!(out, "{:w$}", model.good_name(g));
        for a in 0..model.n_agents() {
            let text = map.get(g, a).map_or_else(|| "0".to_string(), &cell);
            let _ = write!(out, " {text:>w$}");
        }
        if let Some((_, f)) = extra {
            let _ = write!(out, " {:>w$}", f(g));
        }
        out.push('\n');
    }
}

pub fn rates_table(model: &MatchingModel, r: &RateReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "B = {:.6}", r.b);
    let lost = |g: usize| format!("{:.3}", r.loss[g]);
    matrix(
        &mut out,
        model,
        "matching rates",
        &r.rates,
        |v| format!("{v:.3}"),
        Some(("lost", &lost)),
    );
    out
}

pub fn moments_table(model: &MatchingModel, d: &DelayReport, kind: MomentKind) -> String {
    let (pair, agent, sym) = match kind {
        MomentKind::Delay => (&d.pair, &d.agent, "L"),
        MomentKind::Wait => (&d.wait_pair, &d.wait_agent, "W"),
    };
    let mut out = String::new();
    matrix(
        &mut out,
        model,
        &format!("E({sym})"),
        pair,
        |m: &Moments| format!("{:.2}", m.mean),
        None,
    );
    matrix(
        &mut out,
        model,
        &format!("sd({sym})"),
        pair,
        |m: &Moments| format!("{:.2}", m.std_dev()),
        None,
    );
    for (a, m) in agent.iter().enumerate() {
        let name = model.agent_name(a);
        match m {
            Some(m) => {
                let _ = writeln!(
                    out,
                    "E({sym}_{name}) = {:.2}, sd({sym}_{name}) = {:.2}",
                    m.mean,
                    m.std_dev()
                );
            }
            None => {
                let _ = writeln!(out, "{name}: never matched");
            }
        }
    }
    out
}
