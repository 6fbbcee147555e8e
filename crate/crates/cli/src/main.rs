mod commands;
mod manifest;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Builds broken Chimera and Pegasus instances from planar bipartite graphs
/// and moves Hamiltonian cycles between them.
#[derive(Parser, Debug)]
#[command(name = "chimera-reduce", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Style {
    Svg,
    Ascii,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check an instance file against the input class.
    Validate { instance: PathBuf },
    /// Find a grid representation of an instance.
    Embed {
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        side_bound: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the enlarged representation from an instance and its representation.
    Enlarge {
        instance: PathBuf,
        representation: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the whole construction and write every artifact.
    Build { manifest: PathBuf },
    /// Write the augmented graph only.
    Pegasus { manifest: PathBuf },
    /// Lift a Hamiltonian cycle of the instance (found by search if not given).
    Lift {
        manifest: PathBuf,
        /// JSON list of vertex ids.
        #[arg(long)]
        cycle: Option<PathBuf>,
    },
    /// Recover the instance cycle from a Chimera cycle artifact.
    Extract { manifest: PathBuf, cycle: PathBuf },
    /// Decide the instance, then lift, verify and extract.
    Solve { manifest: PathBuf },
    /// Check a Chimera cycle artifact against the composed graph.
    Verify { manifest: PathBuf, cycle: PathBuf },
    /// Draw a Chimera artifact.
    Render {
        chimera: PathBuf,
        #[arg(long, value_enum, default_value_t = Style::Svg)]
        style: Style,
        #[arg(long)]
        cycle: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search for a vertex gadget and write it as a fixture.
    GadgetSearch {
        #[arg(long, default_value_t = 8)]
        max_broken: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// A well-formed input that fails a check.
#[derive(Debug)]
pub struct Refused(pub String);

impl fmt::Display for Refused {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Refused {}

const EXIT_INVALID: u8 = 1;
const EXIT_TIMEOUT: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    use chimera_core::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Timeout(_) => EXIT_TIMEOUT,
                E::InvariantViolation(_) | E::PlanInfeasible(_) | E::ConstructionFailed(_) | E::TriangleCollapse(_) => {
                    EXIT_INVARIANT
                }
                _ => EXIT_INVALID,
            };
        }
    }
    EXIT_INVALID
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
