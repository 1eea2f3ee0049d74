//! Command-line workbench: build clock Hamiltonians from circuit files, scan
//! spectra, integrate sweeps, sample measurements, run the factoring
//! pipeline, verify prepared states, and drive the regression corpus.
//!
//! All JSON outputs carry `schema_version` and the seed that produced them,
//! and are byte-deterministic for a fixed invocation; wall-clock metadata
//! lives in a `<out>.meta.json` sidecar. Exit codes: 0 success, 1 domain
//! error, 2 usage error.

mod commands;
mod output;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "stoqaqc", version, about = "Stoquastic clock-Hamiltonian workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower a circuit file to an interpolated Hamiltonian and export it.
    Build(commands::BuildArgs),
    /// Scan H(s) off-diagonals for stoquasticity violations.
    CheckStoquastic(commands::CheckArgs),
    /// Scan the spectral gap along the interpolation path.
    Gap(commands::GapArgs),
    /// Integrate the sweep and compare against the exact final ground state.
    Evolve(commands::EvolveArgs),
    /// Sample clock-conditioned Pauli measurements of the final ground state.
    Sample(commands::SampleArgs),
    /// Sequential single-qubit measurements with collapse between steps.
    AdaptiveSample(commands::AdaptiveArgs),
    /// Factor an integer through the order-finding pipeline.
    Factor(commands::FactorArgs),
    /// Energy-based certification of a prepared state.
    Verify(commands::VerifyArgs),
    /// Generate a union-jack lattice and its circuit.
    Unionjack(commands::UnionJackArgs),
    /// Encoded-readout error-protection experiment.
    CssExperiment(commands::CssArgs),
    /// Run the full regression corpus and print a pass/fail table.
    Corpus(commands::CorpusArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(args) => commands::build(args),
        Command::CheckStoquastic(args) => commands::check_stoquastic(args),
        Command::Gap(args) => commands::gap(args),
        Command::Evolve(args) => commands::evolve(args),
        Command::Sample(args) => commands::sample(args),
        Command::AdaptiveSample(args) => commands::adaptive_sample(args),
        Command::Factor(args) => commands::factor(args),
        Command::Verify(args) => commands::verify(args),
        Command::Unionjack(args) => commands::unionjack(args),
        Command::CssExperiment(args) => commands::css_experiment(args),
        Command::Corpus(args) => commands::corpus(args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(1);
        }
    }
}
