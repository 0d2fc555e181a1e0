use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};

mod args;
mod commands;

use args::Command;

#[derive(Debug, Parser)]
#[command(
    name = "polarrate",
    version,
    about = "Channel polarization experiments"
)]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads for Monte Carlo and sweeps (0 = one per core).
    /// Results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(polarrate::Error),
    Io(std::io::Error),
}

impl From<polarrate::Error> for CliError {
    fn from(e: polarrate::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

const EXIT_USAGE: u8 = 1;
const EXIT_RESOURCE_CAP: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        eprintln!("error: cannot start {} worker threads: {e}", cli.threads);
        return ExitCode::from(EXIT_USAGE);
    }

    let name = cli.command.name();
    let result = commands::run(&cli.command, cli.out.as_deref())
        .and_then(|output| emit(&output, cli.out.as_deref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Core(e)) if e.is_resource_cap() => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RESOURCE_CAP)
        }
        Err(err) => {
            match err {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Core(polarrate::Error::InvalidParameter { name, reason }) => {
                    eprintln!(
                        "error: invalid value for --{}: {reason}",
                        name.replace('_', "-")
                    )
                }
                CliError::Core(e) => eprintln!("error: {e}"),
                CliError::Io(e) => eprintln!("error: {e}"),
            }
            let mut cmd = Cli::command();
            cmd.build();
            if let Some(sub) = cmd.find_subcommand_mut(name) {
                eprintln!("\n{}", sub.render_usage());
            }
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn emit(text: &str, out: Option<&std::path::Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
