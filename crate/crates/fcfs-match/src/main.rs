use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fcfs_match::{execute, Command, Format, RhoGrid, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "fcfs-match",
    version,
    about = "Exact metrics and Monte Carlo verification for directed FCFS bipartite matching",
    after_help = "Exit codes: 0 ok, 2 invalid model or arguments, 3 unstable, 4 too many agent types, 5 verification failed.\nFCFS_MATCH_THREADS caps the number of worker threads."
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Validate a model and report stability, pooling and the maximal stable intensity
    Validate(Io),
    /// Normalizing constant, matching rates, loss rates and conditional fractions
    Rates(Analytic),
    /// Means and variances of delays, counted in items
    Delays(Analytic),
    /// Means and variances of waiting times under Poisson arrivals
    Waits(Analytic),
    /// Rates and delays over a grid of traffic intensities
    Sweep(SweepArgs),
    /// Simulate the matching process
    Simulate(SimArgs),
    /// Compare analytic values with a simulation, failing when any |z| exceeds --z-max
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct Io {
    /// Model file (JSON)
    #[arg(long)]
    model: PathBuf,
    /// Output file; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct Analytic {
    #[command(flatten)]
    io: Io,
    /// Allow more agent types than the default enumeration cap
    #[arg(long)]
    allow_large: bool,
    /// Print matrices to standard output
    #[arg(long)]
    table: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, default_value_t = RhoGrid::default().min)]
    rho_min: f64,
    #[arg(long, default_value_t = RhoGrid::default().max)]
    rho_max: f64,
    /// Number of grid points
    #[arg(long, default_value_t = RhoGrid::default().steps)]
    steps: usize,
    #[arg(long)]
    allow_large: bool,
}

#[derive(Args, Debug)]
struct Sim {
    #[arg(long, default_value_t = 1_000_000)]
    events: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Items discarded before measuring; defaults to max(1%, 10^4), at most half the run
    #[arg(long)]
    burn_in: Option<u64>,
}

#[derive(Args, Debug)]
struct SimArgs {
    #[command(flatten)]
    io: Io,
    #[command(flatten)]
    sim: Sim,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    io: Io,
    #[command(flatten)]
    sim: Sim,
    #[arg(long, default_value_t = 4.0)]
    z_max: f64,
    #[arg(long)]
    allow_large: bool,
    #[arg(long, hide = true, default_value_t = 0.0)]
    corrupt_rate: f64,
}

fn base(command: Command, io: Io) -> RunConfig {
    let mut c = RunConfig::new(command, io.model);
    c.out = io.out;
    c.format = io.format;
    c
}

fn with_sim(mut c: RunConfig, sim: Sim) -> RunConfig {
    c.events = sim.events;
    c.seed = sim.seed;
    c.burn_in = sim.burn_in;
    c
}

fn analytic(command: Command, a: Analytic) -> RunConfig {
    let mut c = base(command, a.io);
    c.allow_large = a.allow_large;
    c.table = a.table;
    c
}

fn config(cmd: Cmd) -> RunConfig {
    match cmd {
        Cmd::Validate(io) => base(Command::Validate, io),
        Cmd::Rates(a) => analytic(Command::Rates, a),
        Cmd::Delays(a) => analytic(Command::Delays, a),
        Cmd::Waits(a) => analytic(Command::Waits, a),
        Cmd::Sweep(s) => {
            let mut c = base(Command::Sweep, s.io);
            c.grid = RhoGrid {
                min: s.rho_min,
                max: s.rho_max,
                steps: s.steps,
            };
            c.allow_large = s.allow_large;
            c
        }
        Cmd::Simulate(s) => with_sim(base(Command::Simulate, s.io), s.sim),
        Cmd::Verify(v) => {
            let mut c = with_sim(base(Command::Verify, v.io), v.sim);
            c.z_max = v.z_max;
            c.allow_large = v.allow_large;
            c.corrupt_rate = v.corrupt_rate;
            c
        }
    }
}

fn main() -> ExitCode {
    let config = config(Cli::parse().command);
    match execute(&config, &mut io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fcfs-match: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
