use std::fs;
use std::io::Write;

use fcfs_match_core::analytic::pi_y_perm;
use fcfs_match_core::simulator::run;
use fcfs_match_core::MatchingModel;

use crate::config::{Command, Format, RunConfig};
use crate::model_file::read_model;
use crate::report::{self, MomentKind};
use crate::{parallel, table, CliError};

/// Runs one command. Reports go to `--out` when given and to `stdout`
/// otherwise; `--table` matrices always go to `stdout`.
pub fn execute(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    config.validate()?;
    let model = read_model(&config.model)?;
    let pool = parallel::thread_pool()?;
    let mut buffer = Vec::new();
    let result = pool.install(|| dispatch(config, &model, &mut buffer));
    // a failed verification still delivers its comparison
    stdout.write_all(&buffer)?;
    stdout.flush()?;
    result
}

fn emit(config: &RunConfig, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match &config.out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

fn dispatch(
    config: &RunConfig,
    model: &MatchingModel,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let opts = config.options();
    let format = config.format();
    // with --table and no --out only the matrices are printed
    let file_wanted = !config.table || config.out.is_some();
    match config.command {
        Command::Validate => emit(config, stdout, &json_text(&report::validation_json(model))),
        Command::Rates => {
            let r = parallel::matching_rates(model, &opts)?;
            if config.table {
                stdout.write_all(table::rates_table(model, &r).as_bytes())?;
            }
            if !file_wanted {
                return Ok(());
            }
            let text = match format {
                Format::Json => json_text(&report::rates_json(model, &r)),
                Format::Csv => report::rates_csv(model, &r)?,
            };
            emit(config, stdout, &text)
        }
        Command::Delays | Command::Waits => {
            let kind = if config.command == Command::Delays {
                MomentKind::Delay
            } else {
                MomentKind::Wait
            };
            let a = parallel::analyze(model, &opts)?;
            if config.table {
                stdout.write_all(table::moments_table(model, &a.delays, kind).as_bytes())?;
            }
            if !file_wanted {
                return Ok(());
            }
            let text = match format {
                Format::Json => json_text(&report::moments_json(model, &a.delays, kind)),
                Format::Csv => report::moments_csv(model, &a.delays, kind)?,
            };
            emit(config, stdout, &text)
        }
        Command::Sweep => {
            let s = parallel::sweep(model, &config.rho_grid()?, &opts)?;
            let text = match format {
                Format::Json => json_text(&report::sweep_json(model, &s)),
                Format::Csv => report::sweep_csv(model, &s)?,
            };
            emit(config, stdout, &text)
        }
        Command::Simulate => {
            let stats = run(model, &config.sim_config())?;
            emit(config, stdout, &json_text(&report::sim_json(model, &stats)))
        }
        Command::Verify => verify(config, model, stdout),
    }
}

fn verify(
    config: &RunConfig,
    model: &MatchingModel,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let opts = config.options();
    let (analysis, stats) = rayon::join(
        || parallel::analyze(model, &opts),
        || run(model, &config.sim_config()),
    );
    let mut analysis = analysis?;
    let stats = stats?;
    if config.corrupt_rate != 0.0 {
        let first = analysis
            .rates
            .rates
            .iter()
            .next()
            .map(|(g, a, r)| (g, a, *r));
        if let Some((g, a, r)) = first {
            analysis
                .rates
                .rates
                .set(g, a, Some(r + config.corrupt_rate));
        }
    }
    // orders observed in the run are valid by construction
    let rows = report::compare(model, &analysis.rates, &analysis.delays, &stats, |order| {
        pi_y_perm(model, order).unwrap_or(f64::NAN)
    });
    let text = match config.format() {
        Format::Csv => report::comparison_csv(&rows)?,
        Format::Json => {
            let list: Vec<serde_json::Value> = rows
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "quantity": c.quantity,
                        "analytic": crate::number::round_number(c.analytic),
                        "empirical": crate::number::round_number(c.empirical),
                        "stderr": crate::number::round_number(c.std_error),
                        "z_score": crate::number::round_number(c.z_score),
                    })
                })
                .collect();
            json_text(&serde_json::Value::Array(list))
        }
    };
    emit(config, stdout, &text)?;
    let failed = rows.iter().filter(|c| !c.passes(config.z_max)).count();
    if failed > 0 {
        return Err(CliError::VerifyFailed {
            failed,
            checked: rows.len(),
            z_max: config.z_max,
        });
    }
    Ok(())
}
