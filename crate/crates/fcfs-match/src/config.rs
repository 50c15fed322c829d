use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fcfs_match_core::analytic::EnumerationOptions;
use fcfs_match_core::limits::uniform_grid;
use fcfs_match_core::simulator::SimConfig;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Rates,
    Delays,
    Waits,
    Sweep,
    Simulate,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}` (expected json or csv)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// `steps` equally spaced traffic intensities from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoGrid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Default for RhoGrid {
    fn default() -> Self {
        Self {
            min: 0.05,
            max: 0.95,
            steps: 19,
        }
    }
}

/// Everything one invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub model: PathBuf,
    pub out: Option<PathBuf>,
    /// `None` picks the command's natural format.
    pub format: Option<Format>,
    pub grid: RhoGrid,
    pub events: u64,
    pub seed: u64,
    /// `None` uses the simulator's default.
    pub burn_in: Option<u64>,
    /// Lifts the cap on the number of agent types.
    pub allow_large: bool,
    pub z_max: f64,
    pub table: bool,
    /// Test hook: offset added to the first analytic rate before comparison.
    pub corrupt_rate: f64,
}

impl RunConfig {
    pub fn new(command: Command, model: impl Into<PathBuf>) -> Self {
        Self {
            command,
            model: model.into(),
            out: None,
            format: None,
            grid: RhoGrid::default(),
            events: 1_000_000,
            seed: 1,
            burn_in: None,
            allow_large: false,
            z_max: 4.0,
            table: false,
            corrupt_rate: 0.0,
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(match self.command {
            Command::Sweep | Command::Verify => Format::Csv,
            _ => Format::Json,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let g = self.grid;
        if g.steps < 1 {
            return bad("--steps must be at least 1".into());
        }
        if !(0.0 < g.min && g.min <= g.max && g.max < 1.0) {
            return bad(format!(
                "need 0 < rho-min <= rho-max < 1, got {} and {}",
                g.min, g.max
            ));
        }
        if g.steps == 1 && g.min != g.max {
            return bad("a single-point grid needs rho-min = rho-max".into());
        }
        if !(self.z_max > 0.0) {
            return bad(format!("--z-max must be positive, got {}", self.z_max));
        }
        if self.events == 0 {
            return bad("--events must be positive".into());
        }
        if let Some(b) = self.burn_in {
            if b >= self.events {
                return bad(format!(
                    "--burn-in {b} must be below --events {}",
                    self.events
                ));
            }
        }
        if self.command == Command::Validate && self.format() == Format::Csv {
            return bad("validate only writes JSON".into());
        }
        if self.command == Command::Simulate && self.format() == Format::Csv {
            return bad("simulate only writes JSON".into());
        }
        Ok(())
    }

    pub fn options(&self) -> EnumerationOptions {
        if self.allow_large {
            EnumerationOptions::uncapped()
        } else {
            EnumerationOptions::default()
        }
    }

    pub fn rho_grid(&self) -> Result<Vec<f64>, CliError> {
        Ok(uniform_grid(self.grid.min, self.grid.max, self.grid.steps)?)
    }

    pub fn sim_config(&self) -> SimConfig {
        let config = SimConfig::new(self.events, self.seed);
        match self.burn_in {
            Some(b) => config.with_burn_in(b),
            None => config,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_invariants() {
        let mut c = RunConfig::new(Command::Sweep, "m.json");
        assert!(c.validate().is_ok());
        c.grid = RhoGrid {
            min: 0.5,
            max: 0.4,
            steps: 3,
        };
        assert!(c.validate().is_err());
        c.grid = RhoGrid {
            min: 0.0,
            max: 0.4,
            steps: 3,
        };
        assert!(c.validate().is_err());
        c.grid = RhoGrid {
            min: 0.2,
            max: 1.0,
            steps: 3,
        };
        assert!(c.validate().is_err());
        c.grid = RhoGrid {
            min: 0.7,
            max: 0.7,
            steps: 1,
        };
        assert_eq!(c.rho_grid().unwrap(), vec![0.7]);
        c.grid.steps = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn burn_in_must_leave_events() {
        let mut c = RunConfig::new(Command::Simulate, "m.json");
        c.events = 100;
        c.burn_in = Some(100);
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        c.burn_in = Some(99);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn natural_formats() {
        assert_eq!(RunConfig::new(Command::Rates, "m").format(), Format::Json);
        assert_eq!(RunConfig::new(Command::Sweep, "m").format(), Format::Csv);
        assert_eq!("csv".parse::<Format>(), Ok(Format::Csv));
        assert!("xml".parse::<Format>().is_err());
    }
}
