//! `rswitch`: configuration-driven runs, parameter sweeps, figure
//! reproduction and the acceptance suite of the `rydberg-switch` simulator.

pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod quantity;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Overrides;
use crate::config::{FigureKind, RunConfig, SolverChoice};
use crate::error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "rswitch", version, about = "Rydberg-EIT single-photon switch simulator")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub solver: Option<SolverChoice>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub plots: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the configured scenario and write reports and CSV arrays.
    Run,
    /// Run the `[sweep]` section of the configuration.
    Sweep,
    /// Reproduce a reference figure (configuration optional).
    Figure {
        #[arg(value_enum)]
        which: FigureKind,
    },
    /// Run the acceptance checks.
    Validate {
        /// Comma-separated check ids; all when omitted.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<u32>,
    },
}

impl Cli {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            solver: self.solver,
            plots: self.plots,
        }
    }

    fn load(&self, required: bool) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None if required => {
                return Err(CliError::Usage(
                    "missing --config PATH (a starting point ships as configs/default.toml)".into(),
                ))
            }
            None => RunConfig::default_config(),
        };
        self.overrides().apply(&mut cfg);
        Ok(cfg)
    }

    pub fn execute(&self) -> Result<(), CliError> {
        if let Some(n) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
        }
        let written = match &self.command {
            Command::Run => commands::run(&self.load(true)?)?,
            Command::Sweep => commands::sweep(&self.load(true)?)?,
            Command::Figure { which } => commands::figure(*which, &self.load(false)?)?,
            Command::Validate { checks } => {
                return commands::validate(checks, |line| println!("{line}"));
            }
        };
        for p in written {
            println!("wrote {}", p.display());
        }
        Ok(())
    }
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::OK });
        }
    };
    match cli.execute() {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `rswitch --help` for usage");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
