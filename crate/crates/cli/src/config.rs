//! Sweep configuration files and their validation.
//!
//! A config is a TOML file holding one or more `[[sweep]]` tables:
//!
//! ```toml
//! [[sweep]]
//! observable = "bond_profile_xx"
//! engine = "tlimit"
//! j = [0.5, 2.0]
//! h = { from = 0.0, to = 0.5, steps = 3 }
//! bonds = { from = -10, to = 10 }
//! output = "profile.csv"
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use ringcut_core::{Boundary, Site};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    BondProfileXx,
    BondProfileZz,
    CorrelatorsVsJ,
    QdCcVsJ,
    ConcurrenceProfile,
    FidelityVsJ,
    SpectrumScan,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::BondProfileXx => "bond_profile_xx",
            Observable::BondProfileZz => "bond_profile_zz",
            Observable::CorrelatorsVsJ => "correlators_vs_j",
            Observable::QdCcVsJ => "qd_cc_vs_j",
            Observable::ConcurrenceProfile => "concurrence_profile",
            Observable::FidelityVsJ => "fidelity_vs_j",
            Observable::SpectrumScan => "spectrum_scan",
        }
    }

    fn uses_bonds(self) -> bool {
        matches!(
            self,
            Observable::BondProfileXx | Observable::BondProfileZz | Observable::ConcurrenceProfile
        )
    }

    fn uses_pairs(self) -> bool {
        matches!(self, Observable::CorrelatorsVsJ | Observable::QdCcVsJ)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Finite,
    Tlimit,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Finite => "finite",
            Engine::Tlimit => "tlimit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryName {
    RingNaive,
    RingParityExact,
    OpenSegment,
}

impl From<BoundaryName> for Boundary {
    fn from(b: BoundaryName) -> Self {
        match b {
            BoundaryName::RingNaive => Boundary::RingNaive,
            BoundaryName::RingParityExact => Boundary::RingParityExact,
            BoundaryName::OpenSegment => Boundary::OpenSegment,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    /// Geometric instead of linear spacing.
    #[serde(default)]
    pub log: bool,
}

/// Either an explicit list or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range(RangeSpec),
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Range(r) => {
                if r.steps == 1 {
                    return vec![r.from];
                }
                let last = (r.steps - 1) as f64;
                (0..r.steps)
                    .map(|i| {
                        if i == r.steps - 1 {
                            return r.to;
                        }
                        let t = i as f64 / last;
                        if r.log {
                            (r.from.ln() + t * (r.to.ln() - r.from.ln())).exp()
                        } else {
                            r.from + t * (r.to - r.from)
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum BondGrid {
    List(Vec<i64>),
    Span { from: i64, to: i64 },
}

impl BondGrid {
    pub fn values(&self) -> Vec<i64> {
        match self {
            BondGrid::List(v) => v.clone(),
            BondGrid::Span { from, to } => (*from..=*to).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub name: Option<String>,
    pub observable: Observable,
    pub engine: Engine,
    pub boundary: Option<BoundaryName>,
    pub j: Option<Grid>,
    pub h: Option<Grid>,
    #[serde(rename = "M")]
    pub m: Option<Vec<usize>>,
    pub bonds: Option<BondGrid>,
    pub pairs: Option<Vec<[f64; 2]>>,
    pub output: String,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub sweep: Vec<SweepSpec>,
}

/// A fully checked sweep, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub name: String,
    pub observable: Observable,
    pub engine: Engine,
    pub boundary: Boundary,
    pub j: Vec<f64>,
    pub h: Vec<f64>,
    /// Empty for the tlimit engine.
    pub m: Vec<usize>,
    pub bonds: Vec<i64>,
    pub pairs: Vec<(Site, Site)>,
    pub output: PathBuf,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub errors: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
}

impl Diagnostics {
    fn error(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.errors.push(Diagnostic {
            field: field.into(),
            message: message.into(),
        });
    }

    fn warn(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(Diagnostic {
            field: field.into(),
            message: message.into(),
        });
    }

    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// Pairs used by `qd_cc_vs_j` when none are given: the two sites flanking the defect.
pub const DEFAULT_PAIR: [f64; 2] = [-1.5, 1.5];

pub fn parse(text: &str) -> Result<ConfigFile, Diagnostics> {
    toml::from_str(text).map_err(|e| {
        let mut d = Diagnostics::default();
        d.error("config", e.to_string().trim_end().to_string());
        d
    })
}

/// Parse and validate; the sweeps are returned only when there are no errors.
pub fn load(text: &str) -> (Option<Vec<Sweep>>, Diagnostics) {
    match parse(text) {
        Ok(cfg) => {
            let (sweeps, d) = validate(&cfg);
            (d.is_ok().then_some(sweeps), d)
        }
        Err(d) => (None, d),
    }
}

fn check_grid(
    d: &mut Diagnostics,
    field: &str,
    grid: &Option<Grid>,
    nonnegative: bool,
) -> Vec<f64> {
    let Some(grid) = grid else {
        d.error(field, "missing grid");
        return vec![];
    };
    if let Grid::Range(r) = grid {
        if r.steps == 0 {
            d.error(field, "steps must be at least 1");
        }
        if r.log && !(r.from > 0.0 && r.to > 0.0) {
            d.error(field, "a log-spaced range needs positive endpoints");
        }
    }
    let values = grid.values();
    if values.is_empty() {
        d.error(field, "grid is empty");
    }
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            d.error(format!("{field}[{i}]"), "value is not finite");
        } else if nonnegative && *v < 0.0 {
            d.error(format!("{field}[{i}]"), format!("{v} is negative"));
        }
    }
    values
}

pub fn validate(cfg: &ConfigFile) -> (Vec<Sweep>, Diagnostics) {
    let mut d = Diagnostics::default();
    let mut sweeps = Vec::new();
    let mut outputs = BTreeSet::new();
    if cfg.sweep.is_empty() {
        d.error("sweep", "no [[sweep]] tables");
    }
    for (idx, s) in cfg.sweep.iter().enumerate() {
        let at = |f: &str| format!("sweep[{idx}].{f}");
        let obs = s.observable;

        let j = check_grid(&mut d, &at("j"), &s.j, true);
        let h = check_grid(&mut d, &at("h"), &s.h, false);

        let boundary = match (s.engine, s.boundary) {
            (Engine::Tlimit, Some(_)) => {
                d.warn(at("boundary"), "ignored by the tlimit engine");
                Boundary::RingParityExact
            }
            (_, Some(b)) => b.into(),
            (_, None) => Boundary::RingParityExact,
        };

        let m = match (s.engine, &s.m) {
            (Engine::Tlimit, Some(_)) => {
                d.error(at("M"), "the tlimit engine describes the infinite chain; remove the M grid");
                vec![]
            }
            (Engine::Tlimit, None) => vec![],
            (Engine::Finite, None) => {
                d.error(at("M"), "missing grid (required by the finite engine)");
                vec![]
            }
            (Engine::Finite, Some(ms)) => {
                if ms.is_empty() {
                    d.error(at("M"), "grid is empty");
                }
                for (i, &v) in ms.iter().enumerate() {
                    if v < 2 {
                        d.error(format!("{}[{i}]", at("M")), format!("half-length {v} is below 2"));
                    }
                }
                ms.clone()
            }
        };
        let min_m = m.iter().copied().min();

        if obs == Observable::FidelityVsJ {
            if s.engine == Engine::Tlimit {
                d.error(at("engine"), "fidelity_vs_j needs the finite engine");
            }
            if boundary == Boundary::OpenSegment {
                d.error(at("boundary"), "fidelity_vs_j needs a ring boundary");
            }
        }

        let bonds = if obs.uses_bonds() {
            match &s.bonds {
                None => {
                    d.error(at("bonds"), "missing grid");
                    vec![]
                }
                Some(g) => {
                    let b = g.values();
                    if b.is_empty() {
                        d.error(at("bonds"), "grid is empty");
                    }
                    if let Some(mm) = min_m {
                        let reach = mm as i64 - 1;
                        for (i, &v) in b.iter().enumerate() {
                            if v.abs() > reach {
                                d.error(
                                    format!("{}[{i}]", at("bonds")),
                                    format!("bond {v} does not fit in a ring with M = {mm}"),
                                );
                            }
                        }
                    }
                    b
                }
            }
        } else {
            if s.bonds.is_some() {
                d.warn(at("bonds"), format!("ignored by {}", obs.name()));
            }
            vec![]
        };

        let pairs = if obs.uses_pairs() {
            let raw = match (&s.pairs, obs) {
                (Some(p), _) => p.clone(),
                (None, Observable::QdCcVsJ) => vec![DEFAULT_PAIR],
                (None, _) => {
                    d.error(at("pairs"), "missing list of site pairs");
                    vec![]
                }
            };
            if raw.is_empty() {
                d.error(at("pairs"), "list is empty");
            }
            let mut out = Vec::new();
            for (i, [a, b]) in raw.iter().enumerate() {
                let field = format!("{}[{i}]", at("pairs"));
                match (Site::new(*a), Site::new(*b)) {
                    (Ok(sa), Ok(sb)) => {
                        if sa == sb {
                            d.error(field, "the two sites coincide");
                            continue;
                        }
                        if let Some(mm) = min_m {
                            let edge = mm as f64 - 0.5;
                            if sa.abs_value() > edge || sb.abs_value() > edge {
                                d.error(field, format!("site outside the ring with M = {mm}"));
                                continue;
                            }
                        }
                        out.push((sa, sb));
                    }
                    _ => d.error(field, "sites must be half-odd integers such as -1.5"),
                }
            }
            out
        } else {
            if s.pairs.is_some() {
                d.warn(at("pairs"), format!("ignored by {}", obs.name()));
            }
            vec![]
        };

        if s.engine == Engine::Finite
            && boundary == Boundary::RingNaive
            && h.iter().any(|&x| x == 0.0)
            && m.iter().any(|&x| x % 2 == 0)
        {
            d.warn(
                at("h"),
                "h = 0 with even M on the naive ring puts single-particle levels at zero energy; \
                 affected rows carry the zero_mode flag",
            );
        }

        if s.output.trim().is_empty() {
            d.error(at("output"), "empty path");
        } else if !outputs.insert(s.output.clone()) {
            d.error(at("output"), format!("{} is written by an earlier sweep", s.output));
        }

        sweeps.push(Sweep {
            name: s.name.clone().unwrap_or_else(|| format!("sweep{idx}")),
            observable: obs,
            engine: s.engine,
            boundary,
            j,
            h,
            m,
            bonds,
            pairs,
            output: PathBuf::from(&s.output),
            format: s.format,
        });
    }
    (sweeps, d)
}
