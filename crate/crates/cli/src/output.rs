//! Data files and run metadata.
//!
//! Data files hold only computed values, printed with 17 significant digits, so two
//! runs of the same config give identical bytes. Everything that may vary between
//! runs (timing, thread count) goes to the `run_meta.json` sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::{Format, Sweep};
use crate::sweep::Row;

pub const CSV_HEADER: [&str; 10] = [
    "observable",
    "engine",
    "M",
    "j",
    "h",
    "site_or_bond_a",
    "site_or_bond_b",
    "value",
    "flag",
    "err_est",
];

pub const META_FILE: &str = "run_meta.json";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(w: W, rows: &[Row]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in rows {
        out.write_record([
            r.observable.to_string(),
            r.engine.name().to_string(),
            r.m.map(|m| m.to_string()).unwrap_or_default(),
            format_float(r.j),
            format_float(r.h),
            r.a.clone(),
            r.b.clone(),
            format_float(r.value),
            r.flag.clone(),
            format_float(r.err_est),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonRow<'a> {
    observable: &'a str,
    engine: &'a str,
    #[serde(rename = "M")]
    m: Option<usize>,
    j: f64,
    h: f64,
    site_or_bond_a: &'a str,
    site_or_bond_b: &'a str,
    /// `null` when the point failed.
    value: Option<f64>,
    flag: &'a str,
    err_est: Option<f64>,
}

pub fn write_json<W: Write>(mut w: W, rows: &[Row]) -> Result<()> {
    let finite = |x: f64| x.is_finite().then_some(x);
    let out: Vec<JsonRow> = rows
        .iter()
        .map(|r| JsonRow {
            observable: r.observable,
            engine: r.engine.name(),
            m: r.m,
            j: r.j,
            h: r.h,
            site_or_bond_a: &r.a,
            site_or_bond_b: &r.b,
            value: finite(r.value),
            flag: &r.flag,
            err_est: finite(r.err_est),
        })
        .collect();
    serde_json::to_writer_pretty(&mut w, &out)?;
    writeln!(w)?;
    Ok(())
}

pub fn write_rows(path: &Path, format: Format, rows: &[Row]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let w = std::io::BufWriter::new(file);
    match format {
        Format::Csv => write_csv(w, rows),
        Format::Json => write_json(w, rows),
    }
    .with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepMeta {
    pub name: String,
    pub observable: &'static str,
    pub engine: &'static str,
    pub boundary: &'static str,
    pub output: PathBuf,
    pub points: usize,
    pub rows: usize,
    pub failed_rows: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: String,
    pub threads: usize,
    pub sweeps: Vec<SweepMeta>,
}

impl RunMeta {
    pub fn failed_rows(&self) -> usize {
        self.sweeps.iter().map(|s| s.failed_rows).sum()
    }
}

pub fn sweep_meta(s: &Sweep, output: PathBuf, points: usize, rows: &[Row], seconds: f64) -> SweepMeta {
    SweepMeta {
        name: s.name.clone(),
        observable: s.observable.name(),
        engine: s.engine.name(),
        boundary: s.boundary.name(),
        output,
        points,
        rows: rows.len(),
        failed_rows: rows.iter().filter(|r| r.failed()).count(),
        seconds,
    }
}

pub fn write_meta(dir: &Path, meta: &RunMeta) -> Result<()> {
    let path = dir.join(META_FILE);
    let text = serde_json::to_string_pretty(meta)?;
    fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
}
