//! Multi-threaded evaluation. Work is split into independent pieces whose
//! results are combined in a fixed order, so output never depends on the
//! number of threads.

use std::env;

use fcfs_match_core::analytic::{
    Accumulator, Analysis, Enumeration, EnumerationOptions, MetricsAccumulator,
};
use fcfs_match_core::limits::{sweep_point, validate_grid, SweepSeries};
use fcfs_match_core::{AnalyticError, MatchingModel, RateReport};
use rayon::prelude::*;

use crate::CliError;

/// Caps the worker count when set.
pub const THREADS_ENV: &str = "FCFS_MATCH_THREADS";

/// A pool honouring [`THREADS_ENV`]; rayon's default size otherwise.
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = env::var(THREADS_ENV) {
        let n: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| {
                CliError::Config(format!("{THREADS_ENV}={value:?} is not a positive integer"))
            })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker threads: {e}")))
}

fn accumulate(
    model: &MatchingModel,
    options: &EnumerationOptions,
    moments: bool,
) -> Result<MetricsAccumulator, AnalyticError> {
    let e = Enumeration::new(model, options)?;
    let parts: Vec<Result<MetricsAccumulator, AnalyticError>> = (0..e.n_branches())
        .into_par_iter()
        .map(|first| {
            let mut acc = MetricsAccumulator::new(model, moments);
            e.visit_branch(first, &mut acc).map(|_| acc)
        })
        .collect();
    let mut total = MetricsAccumulator::new(model, moments);
    for part in parts {
        total.merge(part?);
    }
    Ok(total)
}

/// Same result as the serial analysis, bit for bit.
pub fn analyze(
    model: &MatchingModel,
    options: &EnumerationOptions,
) -> Result<Analysis, AnalyticError> {
    let (rates, delays) = accumulate(model, options, true)?.finish(model);
    Ok(Analysis {
        rates,
        delays: delays.expect("moments were accumulated"),
    })
}

pub fn matching_rates(
    model: &MatchingModel,
    options: &EnumerationOptions,
) -> Result<RateReport, AnalyticError> {
    Ok(accumulate(model, options, false)?.finish(model).0)
}

/// Grid points are evaluated concurrently; the first failing point in grid
/// order is reported.
pub fn sweep(
    model: &MatchingModel,
    grid: &[f64],
    options: &EnumerationOptions,
) -> Result<SweepSeries, AnalyticError> {
    validate_grid(grid)?;
    let points: Vec<_> = grid
        .par_iter()
        .map(|&rho| sweep_point(model, rho, options))
        .collect();
    Ok(SweepSeries {
        rho_grid: grid.to_vec(),
        points: points.into_iter().collect::<Result<_, _>>()?,
    })
}
