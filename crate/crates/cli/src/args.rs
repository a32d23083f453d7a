use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "stham",
    version,
    about = "Space-time circuit Hamiltonians: spectra, bounds and certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Number of qubits (even).
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Circuit depth (even).
    #[arg(long = "D", global = true)]
    pub depth: Option<usize>,

    /// Momentum sector, or the boundary-term index for angle checks.
    #[arg(long, global = true)]
    pub k: Option<usize>,

    /// Circuit description in JSON.
    #[arg(long, global = true)]
    pub circuit: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Override the command's default tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Low spectrum and gap of the valid-sector Hamiltonian against the gap bound.
    Gap,
    /// Run the bound suite, one record per check.
    Verify {
        /// Restrict to one family of checks.
        #[arg(long, value_enum)]
        only: Option<Family>,
    },
    /// Toy verifier instances of the QMA construction.
    Qma {
        #[arg(long, value_enum)]
        toy: ToyName,
        /// Rotation angle for the biased and noisy toys.
        #[arg(long)]
        angle: Option<f64>,
    },
    /// Lazy random walk on the configuration graph.
    Markov {
        /// Total-variation target for the exact step count.
        #[arg(long, default_value_t = 0.25)]
        tv: f64,
        /// Monte Carlo steps; zero skips the simulation.
        #[arg(long, default_value_t = 0)]
        samples: u64,
    },
    /// Fermionic model against the qubit construction.
    Fermion {
        /// Clock sites per column.
        #[arg(long = "T", default_value_t = 4)]
        clock: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Theorem3,
    Momentum,
    Openb,
    Ds,
    Angle,
    Interpolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ToyName {
    Accept,
    Biased,
    Reject,
    Noisy,
}
