//! `svhe`: waveform dumps, k solving and table sweeps from the command line.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{RunConfig, Settings, OUT_DIR_ENV};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "svhe",
    version,
    about = "Space-vector PWM ripple and harmonic analysis"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every command. Each has a config-file key of the same
/// name (with `_` for `-`); flags win over the file.
#[derive(Args)]
struct Global {
    /// Flat `key = value` config file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory [fallback: $SVHE_OUT_DIR, then .]
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<String>,
    /// DC link voltage, V
    #[arg(long, global = true, value_name = "VOLTS")]
    vdc: Option<String>,
    /// Base frequency, Hz (f1 = fbase·m)
    #[arg(long, global = true, value_name = "HZ")]
    fbase: Option<String>,
    /// Machine pole count
    #[arg(long, global = true, value_name = "N")]
    poles: Option<String>,
    /// Sequence: csv, abc1, abc2 or svhe
    #[arg(long, global = true)]
    seq: Option<String>,
    /// Comma-separated modulation indices
    #[arg(long, global = true, value_name = "LIST")]
    m: Option<String>,
    /// SVHE split: fixed:X, solve-5, solve-7 or half
    #[arg(long, global = true)]
    k: Option<String>,
    /// Stator resistance, Ω
    #[arg(long, global = true, value_name = "OHM")]
    rs: Option<String>,
    /// Rotor resistance, Ω
    #[arg(long, global = true, value_name = "OHM")]
    rr: Option<String>,
    /// Magnetising inductance, H
    #[arg(long, global = true, value_name = "H")]
    lo: Option<String>,
    /// Stator leakage coefficient
    #[arg(long, global = true)]
    sigma_s: Option<String>,
    /// Rotor leakage coefficient
    #[arg(long, global = true)]
    sigma_r: Option<String>,
    /// Rated power, W
    #[arg(long, global = true, value_name = "W")]
    p_rated: Option<String>,
}

#[derive(Args)]
struct SimArgs {
    /// Largest integration step, s
    #[arg(long)]
    dt: Option<String>,
    /// Cycles simulated before measuring
    #[arg(long)]
    settle_cycles: Option<String>,
    /// Cycles recorded
    #[arg(long)]
    measure_cycles: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Pole voltage, flux ripple (one cycle) and torque ripple (one sector) CSVs
    Waveform,
    /// Analytic peak-to-peak torque ripple table
    SweepRipple,
    /// Simulated no-load line-current THD table
    SweepThd(SimArgs),
    /// Division coefficients eliminating the 5th and 7th harmonic
    SolveK,
    /// Modulation index above which SVHE has less q ripple than CSV
    Crossover {
        /// SVHE sample angle, degrees
        #[arg(long)]
        alpha1: Option<String>,
        /// CSV sample angle, degrees
        #[arg(long)]
        alpha2: Option<String>,
    },
    /// All tables plus a summary against the reference data
    Report(SimArgs),
}

fn settings(cli: &Cli) -> Result<Settings, CliError> {
    let mut s = match &cli.global.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let g = &cli.global;
    for (key, value) in [
        ("out", &g.out),
        ("vdc", &g.vdc),
        ("fbase", &g.fbase),
        ("poles", &g.poles),
        ("seq", &g.seq),
        ("m", &g.m),
        ("k", &g.k),
        ("rs", &g.rs),
        ("rr", &g.rr),
        ("lo", &g.lo),
        ("sigma_s", &g.sigma_s),
        ("sigma_r", &g.sigma_r),
        ("p_rated", &g.p_rated),
    ] {
        s.set(key, value.as_ref());
    }
    match &cli.command {
        Command::SweepThd(sim) | Command::Report(sim) => {
            s.set("dt", sim.dt.as_ref());
            s.set("settle_cycles", sim.settle_cycles.as_ref());
            s.set("measure_cycles", sim.measure_cycles.as_ref());
        }
        Command::Crossover { alpha1, alpha2 } => {
            s.set("alpha1", alpha1.as_ref());
            s.set("alpha2", alpha2.as_ref());
        }
        _ => {}
    }
    Ok(s)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&settings(cli)?, std::env::var(OUT_DIR_ENV).ok())?;
    match cli.command {
        Command::Waveform => commands::waveform(&cfg),
        Command::SweepRipple => commands::sweep_ripple_cmd(&cfg),
        Command::SweepThd(_) => commands::sweep_thd_cmd(&cfg),
        Command::SolveK => commands::solve_k_cmd(&cfg),
        Command::Crossover { .. } => commands::crossover_cmd(&cfg),
        Command::Report(_) => commands::report(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
