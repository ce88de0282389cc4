//! `nsgate`: sweeps, optimization and wavefunction dumps for the single-atom
//! nonlinear phase gate.
//!
//! Exit codes: 0 on success, 1 for usage and input errors, 2 when a numeric
//! evaluation or the optimizer fails.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;

use commands::{DumpArgs, OptimizeArgs, Range, StateArgs};
use config::{CommonFlags, ConfigFile, RunConfig};

/// A failed run and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    pub fn usage(error: anyhow::Error) -> Self {
        Self { code: 1, error }
    }

    pub fn numeric(error: anyhow::Error) -> Self {
        Self { code: 2, error }
    }
}

impl From<nsgate_core::Error> for Failure {
    fn from(e: nsgate_core::Error) -> Self {
        Failure::numeric(e.into())
    }
}

#[derive(Parser)]
#[command(
    name = "nsgate",
    version,
    about = "Single-atom nonlinear phase gate efficiency"
)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Dipole relaxation rate Γ (default 1)
    #[arg(long, global = true)]
    gamma: Option<f64>,

    /// Speed of light (default 1)
    #[arg(long = "c", global = true)]
    speed: Option<f64>,

    /// Pulse duration T (default 1.3/Γ)
    #[arg(long = "t", global = true)]
    duration: Option<f64>,

    /// Filter delay l (default 0.9/Γ)
    #[arg(long = "l", global = true, allow_negative_numbers = true)]
    delay: Option<f64>,

    /// Output file; stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// key=value file providing defaults for any flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Grid points per shortest physical length, min(cT, c/Γ)
    #[arg(long, global = true)]
    points_per_unit: Option<f64>,

    /// Tail room behind the pulse, in units of c/Γ (default 15)
    #[arg(long, global = true)]
    extent_margin: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// η₁² and η₂ against pulse duration at fixed delay
    SweepT {
        #[arg(long, allow_negative_numbers = true)]
        tmin: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        tmax: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// η₁² and η₂ against filter delay at fixed pulse duration
    SweepL {
        #[arg(long, allow_negative_numbers = true)]
        lmin: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lmax: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Maximize the transmittance subject to η₁² = η₂
    Optimize {
        #[arg(long, allow_negative_numbers = true)]
        tmin: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        tmax: Option<f64>,
        /// Duration scan step
        #[arg(long)]
        resolution: Option<f64>,
        /// Also write the best crossing at every scanned duration as CSV
        #[arg(long)]
        locus: Option<PathBuf>,
    },
    /// Success probability for an input C₀|0⟩ + C₁|1⟩ + C₂|2⟩
    State {
        #[arg(long, allow_negative_numbers = true)]
        c0: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        c1: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        c2: Option<f64>,
        /// Evaluate at the optimizer's (T*, l*) instead of --t/--l
        #[arg(long)]
        at_optimum: bool,
    },
    /// Input and scattered wavefunctions as CSV
    Dump {
        /// Two-photon samples file (default: <out>_2photon.<ext>)
        #[arg(long)]
        out2: Option<PathBuf>,
        /// Keep every n-th grid node on each axis of the two-photon samples
        #[arg(long)]
        stride: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = cli.common;
    let file = match &c.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let cfg = RunConfig::resolve(
        CommonFlags {
            gamma: c.gamma,
            speed: c.speed,
            duration: c.duration,
            delay: c.delay,
            points_per_unit: c.points_per_unit,
            extent_margin: c.extent_margin,
            out: c.out,
        },
        &file,
    )?;
    match cli.command {
        Command::SweepT { tmin, tmax, steps } => commands::sweep_t(
            cfg,
            &file,
            Range {
                min: tmin,
                max: tmax,
                steps,
            },
        ),
        Command::SweepL { lmin, lmax, steps } => commands::sweep_l(
            cfg,
            &file,
            Range {
                min: lmin,
                max: lmax,
                steps,
            },
        ),
        Command::Optimize {
            tmin,
            tmax,
            resolution,
            locus,
        } => commands::optimize_cmd(
            cfg,
            &file,
            OptimizeArgs {
                tmin,
                tmax,
                resolution,
                locus,
            },
        ),
        Command::State {
            c0,
            c1,
            c2,
            at_optimum,
        } => commands::state(
            cfg,
            &file,
            StateArgs {
                c0,
                c1,
                c2,
                at_optimum,
            },
        ),
        Command::Dump { out2, stride } => commands::dump(cfg, &file, DumpArgs { out2, stride }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
