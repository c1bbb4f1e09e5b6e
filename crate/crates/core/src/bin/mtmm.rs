use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mtmm::experiment::{self, Command, ExperimentConfig};
use mtmm::{Branch, Parity};

#[derive(Parser)]
#[command(
    name = "mtmm",
    version,
    about = "Transfer-matrix optics of membrane arrays in a cavity"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write the table here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    /// Table plus schema version and the resolved configuration.
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Transmittance of both membrane models on the scan grid.
    Spectrum(Common),
    /// Wavelengths of unit array transmission.
    Transmissive(Common),
    /// Optomechanical couplings at the transmissive wavelengths.
    Couplings(Common),
    /// Field along the stack at one wavelength or cavity resonance.
    FieldProfile {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda_nm: Option<f64>,
        /// Ordinal of the resonance within the search window.
        #[arg(long)]
        resonance: Option<usize>,
        #[arg(long, value_parser = ["plus", "minus"])]
        branch: Option<String>,
        #[arg(long, value_parser = ["odd", "even"])]
        parity: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common, overrides) = match cli.command {
        Cmd::Spectrum(c) => (Command::Spectrum, c, None),
        Cmd::Transmissive(c) => (Command::Transmissive, c, None),
        Cmd::Couplings(c) => (Command::Couplings, c, None),
        Cmd::FieldProfile {
            common,
            lambda_nm,
            resonance,
            branch,
            parity,
        } => (
            Command::FieldProfile,
            common,
            Some((lambda_nm, resonance, branch, parity)),
        ),
    };
    let result = ExperimentConfig::from_path(&common.config).and_then(|mut config| {
        if let Some((lambda_nm, resonance, branch, parity)) = overrides {
            let fp = &mut config.field_profile;
            fp.lambda_nm = lambda_nm.or(fp.lambda_nm);
            fp.resonance = resonance.or(fp.resonance);
            if let Some(b) = branch {
                fp.branch = Some(if b == "plus" {
                    Branch::Plus
                } else {
                    Branch::Minus
                });
            }
            if let Some(p) = parity {
                fp.parity = Some(if p == "odd" {
                    Parity::Odd
                } else {
                    Parity::Even
                });
            }
        }
        let table = experiment::run(command, &config)?;
        let text = match common.format {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json(command, &config),
        };
        match &common.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mtmm: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
