use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ringcut::config::load;
use ringcut::presets;
use ringcut::{resolve_threads, run, RunError};

const EXIT_CONFIG: u8 = 1;
const EXIT_PARTIAL: u8 = 2;

#[derive(Parser)]
#[command(name = "ringcut", version, about = "Ground-state sweeps of the XX ring with one bond impurity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every sweep in a config file.
    Run {
        config: PathBuf,
        /// Output directory; defaults to the directory holding the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the sweep (falls back to RINGCUT_THREADS).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a config file and report problems without computing anything.
    Validate { config: PathBuf },
    /// Run a built-in figure preset.
    Preset {
        /// One of fig2 .. fig6, or `list`.
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Print the preset config instead of running it.
        #[arg(long)]
        show: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, threads } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: reading {}: {e}", config.display());
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let dir = out.unwrap_or_else(|| config.parent().map(Path::to_path_buf).unwrap_or_default());
            execute(&text, &config.display().to_string(), &dir, threads)
        }
        Command::Validate { config } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: reading {}: {e}", config.display());
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let (sweeps, d) = load(&text);
            print!("{d}");
            match sweeps {
                Some(s) => {
                    println!("ok: {} sweep(s)", s.len());
                    ExitCode::SUCCESS
                }
                None => ExitCode::from(EXIT_CONFIG),
            }
        }
        Command::Preset {
            name,
            out,
            threads,
            show,
        } => {
            if name == "list" {
                for n in presets::names() {
                    println!("{n}");
                }
                return ExitCode::SUCCESS;
            }
            let Some(text) = presets::preset(&name) else {
                let known: Vec<_> = presets::names().collect();
                eprintln!("error: unknown preset {name:?} (known: {})", known.join(", "));
                return ExitCode::from(EXIT_CONFIG);
            };
            if show {
                print!("{text}");
                return ExitCode::SUCCESS;
            }
            let Some(dir) = out else {
                eprintln!("error: preset {name} needs --out <dir>");
                return ExitCode::from(EXIT_CONFIG);
            };
            execute(text, &format!("preset:{name}"), &dir, threads)
        }
    }
}

fn execute(text: &str, label: &str, dir: &Path, threads: Option<usize>) -> ExitCode {
    let threads = match resolve_threads(threads) {
        Ok(n) => n,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(text, label, dir, threads) {
        Ok(outcome) => {
            eprint!("{}", outcome.warnings);
            for (s, path) in outcome.meta.sweeps.iter().zip(&outcome.files) {
                eprintln!(
                    "{}: {} rows ({} failed) -> {} [{:.2}s]",
                    s.name,
                    s.rows,
                    s.failed_rows,
                    path.display(),
                    s.seconds
                );
            }
            if outcome.meta.failed_rows() > 0 {
                ExitCode::from(EXIT_PARTIAL)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(RunError::Config(d)) => {
            eprint!("{d}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e @ RunError::Io(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
