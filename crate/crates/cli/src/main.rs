//! `gaussqkd` command-line front end.

mod commands;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussqkd_core::Error;

#[derive(Parser, Debug)]
#[command(name = "gaussqkd", version, about = "Gaussian-state CV-QKD analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Base seed for every random stream.
    #[arg(long, global = true, env = "GAUSSQKD_SEED", default_value_t = 0)]
    seed: u64,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Physicality, entanglement and purity of a symmetric state.
    State(StateArgs),
    /// Acceptance interval and per-outcome security verdict.
    Security(commands::SecurityArgs),
    /// Protocol efficiency of one state.
    Efficiency(commands::EfficiencyArgs),
    /// Efficiency over a grid of states, as CSV.
    Sweep(commands::SweepArgs),
    /// Advantage distillation error, closed form and simulated.
    Cad(commands::CadArgs),
    /// One-time-pad XOR.
    Vernam(commands::VernamArgs),
    /// Toy RSA key generation and encryption.
    Rsa(commands::RsaArgs),
    /// BB84 simulation.
    Bb84(commands::Bb84Args),
    /// Ekert91 simulation with CHSH estimate.
    Ekert(commands::EkertArgs),
}

/// `(lambda, c_x, c_p)` of a symmetric standard-form state.
#[derive(Args, Debug, Clone, Copy)]
pub struct StateArgs {
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long = "cx", allow_hyphen_values = true)]
    c_x: f64,
    #[arg(long = "cp", allow_hyphen_values = true)]
    c_p: f64,
}

/// Shared settings handed to every subcommand.
pub struct Ctx {
    pub format: Format,
    pub seed: u64,
    pub out: Box<dyn Write>,
}

/// Failure with a process exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnphysicalInput(_) => 2,
            Error::NotCoherentSecure(_) | Error::NotNppt(_) => 3,
            Error::EmptySweep { .. } => 4,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 1,
            message: format!("i/o error: {e}"),
        }
    }
}

impl Failure {
    pub fn other(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            Failure::other(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout())),
    };
    let mut ctx = Ctx {
        format: cli.format,
        seed: cli.seed,
        out,
    };
    let result = match cli.command {
        Command::State(a) => commands::state(&mut ctx, a),
        Command::Security(a) => commands::security(&mut ctx, a),
        Command::Efficiency(a) => commands::efficiency(&mut ctx, a),
        Command::Sweep(a) => commands::sweep(&mut ctx, a, cli.out.as_deref()),
        Command::Cad(a) => commands::cad(&mut ctx, a),
        Command::Vernam(a) => commands::vernam(&mut ctx, a),
        Command::Rsa(a) => commands::rsa(&mut ctx, a),
        Command::Bb84(a) => commands::bb84(&mut ctx, a),
        Command::Ekert(a) => commands::ekert(&mut ctx, a),
    };
    ctx.out.flush()?;
    result
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("{line}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
