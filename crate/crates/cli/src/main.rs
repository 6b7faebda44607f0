mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mcfc_core::harness::BudgetSpec;
use mcfc_core::photon_channel::LinkBudget;

/// Usage errors: bad flags or arguments.
const EXIT_USAGE: u8 = 1;
/// Data errors: unreadable or malformed inputs, unwritable outputs.
const EXIT_DATA: u8 = 2;
/// Internal errors.
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "mcfc", version, about = "Single-photon multi-channel frequency coding toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate one window of a modulated photon stream and write it as PTS1.
    Generate(commands::GenerateArgs),
    /// Point-process spectrum of a PTS1 stream as CSV.
    Spectrum(commands::SpectrumArgs),
    /// Encode symbols or text and simulate the stream, one window per codeword.
    Encode(commands::EncodeArgs),
    /// Decode a PTS1 stream window by window.
    Decode(commands::DecodeArgs),
    /// Send a binary PPM image through a simulated link.
    TransmitImage(commands::TransmitImageArgs),
    /// Send text through a simulated link.
    TransmitText(commands::TransmitTextArgs),
    /// Run a sweep described in a TOML file; writes CSV and a manifest.
    Sweep(commands::SweepArgs),
    /// Transmission capacity of a frequency plan.
    Capacity(commands::CapacityArgs),
    /// Photon statistics of a stream.
    Stats(commands::StatsArgs),
}

/// Seed flag shared by the stochastic commands.
#[derive(Args, Debug, Clone, Copy)]
struct SeedArgs {
    /// Random seed.
    #[arg(long, env = "MCFC_SEED", default_value_t = 0)]
    seed: u64,
}

/// Channel and detector flags.
#[derive(Args, Debug, Clone, Copy)]
struct BudgetArgs {
    /// Fraction of signal photons reaching the detector.
    #[arg(long, default_value_t = 1.0)]
    transmittance: f64,
    /// Background photon rate, counts/s.
    #[arg(long, default_value_t = 0.0)]
    noise_rate: f64,
    /// Dark count rate, counts/s.
    #[arg(long, default_value_t = 0.0)]
    dark_rate: f64,
    /// Timing jitter FWHM, seconds.
    #[arg(long, default_value_t = 0.0)]
    jitter_fwhm: f64,
    /// Detector dead time, seconds.
    #[arg(long, default_value_t = 0.0)]
    dead_time: f64,
    /// Gating period, seconds (for example 1e-7 for 10 MHz).
    #[arg(long)]
    gate_period: Option<f64>,
}

impl BudgetArgs {
    fn budget(&self) -> mcfc_core::Result<LinkBudget> {
        BudgetSpec {
            transmittance: self.transmittance,
            noise_rate: self.noise_rate,
            dark_rate: self.dark_rate,
            jitter_fwhm: self.jitter_fwhm,
            dead_time: self.dead_time,
            gate_period: self.gate_period,
        }
        .to_budget()
    }
}

/// Failure of a command, classified by exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<mcfc_core::Error> for Failure {
    fn from(e: mcfc_core::Error) -> Self {
        use mcfc_core::Error;
        match e {
            Error::InvalidParameter(_) | Error::GridTooLarge { .. } | Error::UnknownSymbol(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Data(other.to_string()),
        }
    }
}

fn input_path(path: &std::path::Path) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Data(format!("{}: no such file", path.display())))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = std::panic::catch_unwind(|| commands::run(cli.command));
    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Usage(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Ok(Err(Failure::Data(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DATA)
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
