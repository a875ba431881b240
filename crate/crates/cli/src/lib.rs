//! Parameter sweeps over the bond-impurity XX ring, written as CSV or JSON tables.
//!
//! The binary is a thin wrapper over [`run`]; the library is exposed so tests and
//! other tools can drive sweeps without a subprocess.

pub mod config;
pub mod output;
pub mod presets;
pub mod sweep;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};

use config::{load, Diagnostics, Sweep};
use output::{sweep_meta, write_meta, write_rows, RunMeta};

/// Environment variable consulted when `--threads` is not given.
pub const THREADS_ENV: &str = "RINGCUT_THREADS";

#[derive(Debug)]
pub enum RunError {
    /// The config did not validate; nothing was computed.
    Config(Diagnostics),
    Io(anyhow::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(d) => write!(f, "{d}"),
            RunError::Io(e) => write!(f, "{e:#}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub meta: RunMeta,
    pub warnings: Diagnostics,
    pub files: Vec<PathBuf>,
}

/// Thread count from the flag, then the environment, then rayon's default.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return Ok(n.max(1));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|n| n.max(1))
            .with_context(|| format!("{THREADS_ENV}={v} is not a thread count")),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Validate `text` and run every sweep, writing outputs under `out_dir`.
pub fn run(text: &str, label: &str, out_dir: &Path, threads: usize) -> Result<RunOutcome, RunError> {
    let (sweeps, diagnostics) = load(text);
    let Some(sweeps) = sweeps else {
        return Err(RunError::Config(diagnostics));
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunError::Io(e.into()))?;
    let mut metas = Vec::new();
    let mut files = Vec::new();
    for s in &sweeps {
        let (rows, seconds) = pool.install(|| timed(s));
        let path = out_dir.join(&s.output);
        write_rows(&path, s.format, &rows).map_err(RunError::Io)?;
        metas.push(sweep_meta(s, s.output.clone(), sweep::points(s).len(), &rows, seconds));
        files.push(path);
    }
    let meta = RunMeta {
        tool: "ringcut",
        version: env!("CARGO_PKG_VERSION"),
        config: label.to_string(),
        threads,
        sweeps: metas,
    };
    write_meta(out_dir, &meta).map_err(RunError::Io)?;
    Ok(RunOutcome {
        meta,
        warnings: diagnostics,
        files,
    })
}

fn timed(s: &Sweep) -> (Vec<sweep::Row>, f64) {
    let start = Instant::now();
    let rows = sweep::run_sweep(s);
    (rows, start.elapsed().as_secs_f64())
}
