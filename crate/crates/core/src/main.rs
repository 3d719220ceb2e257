//! Command-line interface: each subcommand emits one reproducible table.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand as ClapSubcommand};

use vbsim::config::Config;
use vbsim::output::Format;
use vbsim::runner::{run, RunConfig, Subcommand, DEFAULT_SEED};

#[derive(Parser)]
#[command(
    name = "vbsim",
    about = "Linear-optics simulation of Heisenberg spin lattices: HOM visibility \
             curves, concurrence scans, exact spectra, and valence-bond coefficient tables",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct CommonArgs {
    /// Structured-text config file (line-oriented `key = value`)
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed; fixed default makes runs reproducible
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: Format,
}

fn parse_format(s: &str) -> Result<Format, String> {
    Format::parse(s).ok_or_else(|| format!("unknown format '{s}' (use csv or json)"))
}

#[derive(ClapSubcommand)]
enum Command {
    /// Ideal and systematic-factor HOM visibility versus reflectivity
    HomVisibility(CommonArgs),
    /// Coincidence-rate dip versus optical delay at one reflectivity
    HomDip(CommonArgs),
    /// Pairwise concurrence of the post-selected four-photon family versus TDC angle
    ConcurrenceScan(CommonArgs),
    /// Four-site ground-state coefficients over the (J2/J1, J3/J1) plane
    PhaseDiagram(CommonArgs),
    /// Low-lying checkerboard spectrum in an Sz sector versus J2/J1
    CheckerboardSpectrum(CommonArgs),
    /// Checkerboard ground state decomposed over the four allowed dimer coverings
    CheckerboardCoefficients(CommonArgs),
    /// State -> counts -> reconstruction closure report for the singlet
    TomographyDemo(CommonArgs),
}

impl Command {
    fn split(self) -> (Subcommand, CommonArgs) {
        match self {
            Command::HomVisibility(a) => (Subcommand::HomVisibility, a),
            Command::HomDip(a) => (Subcommand::HomDip, a),
            Command::ConcurrenceScan(a) => (Subcommand::ConcurrenceScan, a),
            Command::PhaseDiagram(a) => (Subcommand::PhaseDiagram, a),
            Command::CheckerboardSpectrum(a) => (Subcommand::CheckerboardSpectrum, a),
            Command::CheckerboardCoefficients(a) => (Subcommand::CheckerboardCoefficients, a),
            Command::TomographyDemo(a) => (Subcommand::TomographyDemo, a),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let (subcommand, args) = cli.command.split();
    let config = match &args.config {
        None => Config::default(),
        Some(path) => match Config::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("vbsim: {e}");
                return ExitCode::from(1);
            }
        },
    };
    let rc = RunConfig {
        subcommand,
        config,
        seed: args.seed,
        out: args.out,
        format: args.format,
    };
    match run(&rc) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vbsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
