//! Evaluation of sweep points into output rows.
//!
//! A point is one `(M, j, h)` combination (`(j, h)` for the infinite chain). Points
//! are independent and run on the rayon pool; rows come back in grid order, so the
//! output does not depend on scheduling.

use rayon::prelude::*;

use ringcut_core::corr::{
    bond_correlator, ground_state_correlations, xx_correlator, zz_correlator, Axis, TwoPointSource,
};
use ringcut_core::fid::{ring_cut_fidelity_with, segment_modes};
use ringcut_core::qinfo::{
    classical_correlations, concurrence_closed_form, quantum_discord, two_qubit_rdm,
};
use ringcut_core::spectrum::{bound_state_energies, ground_state, BandSide};
use ringcut_core::tlimit::{bound_state_poles, TlLazy};
use ringcut_core::{ModelParams, Site};

use crate::config::{Engine, Observable, Sweep};

/// One output line.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub observable: &'static str,
    pub engine: Engine,
    pub m: Option<usize>,
    pub j: f64,
    pub h: f64,
    pub a: String,
    pub b: String,
    /// NaN when the point failed.
    pub value: f64,
    pub flag: String,
    pub err_est: f64,
}

impl Row {
    pub fn failed(&self) -> bool {
        self.flag.split(';').any(|f| f.starts_with("error"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub m: Option<usize>,
    pub j: f64,
    pub h: f64,
}

/// Grid points in output order: `M` outermost, then `j`, then `h`.
pub fn points(s: &Sweep) -> Vec<Point> {
    let ms: Vec<Option<usize>> = match s.engine {
        Engine::Finite => s.m.iter().map(|&m| Some(m)).collect(),
        Engine::Tlimit => vec![None],
    };
    let mut out = Vec::with_capacity(ms.len() * s.j.len() * s.h.len());
    for &m in &ms {
        for &j in &s.j {
            for &h in &s.h {
                out.push(Point { m, j, h });
            }
        }
    }
    out
}

pub fn run_sweep(s: &Sweep) -> Vec<Row> {
    points(s)
        .par_iter()
        .map(|p| evaluate(s, p))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// State-level flags shared by every row of a point.
#[derive(Debug, Clone, Copy, Default)]
struct Flags {
    zero_mode: bool,
    degenerate: bool,
}

impl Flags {
    fn render(self) -> String {
        let mut parts = Vec::new();
        if self.zero_mode {
            parts.push("zero_mode");
        }
        if self.degenerate {
            parts.push("degenerate");
        }
        parts.join(";")
    }
}

struct Emitter<'a> {
    sweep: &'a Sweep,
    point: Point,
    flags: Flags,
    rows: Vec<Row>,
}

impl Emitter<'_> {
    fn push(&mut self, observable: &'static str, a: String, b: String, value: f64, err_est: f64) {
        self.rows.push(Row {
            observable,
            engine: self.sweep.engine,
            m: self.point.m,
            j: self.point.j,
            h: self.point.h,
            a,
            b,
            value,
            flag: self.flags.render(),
            err_est,
        });
    }

    fn fail(&mut self, observable: &'static str, a: String, b: String, err: &dyn std::fmt::Display) {
        let mut flag = self.flags.render();
        if !flag.is_empty() {
            flag.push(';');
        }
        flag.push_str(&format!("error: {err}"));
        self.rows.push(Row {
            observable,
            engine: self.sweep.engine,
            m: self.point.m,
            j: self.point.j,
            h: self.point.h,
            a,
            b,
            value: f64::NAN,
            flag,
            err_est: f64::NAN,
        });
    }
}

fn evaluate(s: &Sweep, p: &Point) -> Vec<Row> {
    let mut out = Emitter {
        sweep: s,
        point: *p,
        flags: Flags::default(),
        rows: Vec::new(),
    };
    match s.observable {
        Observable::FidelityVsJ => fidelity(&mut out),
        Observable::SpectrumScan => spectrum(&mut out),
        _ => match source(s, p.m, p.j, p.h) {
            Ok((src, flags)) => {
                out.flags = flags;
                correlations(&mut out, src.as_ref());
            }
            Err(e) => out.fail(primary_name(s.observable), String::new(), String::new(), &e),
        },
    }
    out.rows
}

fn primary_name(o: Observable) -> &'static str {
    match o {
        Observable::BondProfileXx => "xx",
        Observable::BondProfileZz => "zz",
        Observable::CorrelatorsVsJ => "xx",
        Observable::QdCcVsJ => "qd",
        Observable::ConcurrenceProfile => "concurrence",
        Observable::FidelityVsJ => "fidelity",
        Observable::SpectrumScan => "bound_state",
    }
}

type Source = Box<dyn TwoPointSource + Send>;

fn source(s: &Sweep, m: Option<usize>, j: f64, h: f64) -> anyhow::Result<(Source, Flags)> {
    match (s.engine, m) {
        (Engine::Finite, Some(m)) => {
            let params = ModelParams::new(m, j, h, s.boundary)?;
            let g = ground_state(&params)?;
            let flags = Flags {
                zero_mode: g.zero_mode_flag(),
                degenerate: g.degenerate,
            };
            Ok((Box::new(ground_state_correlations(&g)), flags))
        }
        _ => {
            let src = TlLazy::new(j, h)?;
            let flags = Flags {
                zero_mode: src.zero_mode_flag(),
                degenerate: false,
            };
            Ok((Box::new(src), flags))
        }
    }
}

fn site_label(s: Site) -> String {
    s.to_string()
}

fn correlations(out: &mut Emitter, src: &dyn TwoPointSource) {
    let s = out.sweep;
    match s.observable {
        Observable::BondProfileXx | Observable::BondProfileZz => {
            let (axis, name) = if s.observable == Observable::BondProfileXx {
                (Axis::X, "xx")
            } else {
                (Axis::Z, "zz")
            };
            for &b in &s.bonds {
                match bond_correlator(src, axis, b) {
                    Ok(v) => out.push(name, b.to_string(), String::new(), v, src.error_estimate()),
                    Err(e) => out.fail(name, b.to_string(), String::new(), &e),
                }
            }
        }
        Observable::ConcurrenceProfile => {
            for &b in &s.bonds {
                let (n, m) = Site::bond(b);
                match concurrence_closed_form(src, n, m) {
                    Ok(v) => out.push("concurrence", b.to_string(), String::new(), v, src.error_estimate()),
                    Err(e) => out.fail("concurrence", b.to_string(), String::new(), &e),
                }
            }
        }
        Observable::CorrelatorsVsJ => {
            for &(n, m) in &s.pairs {
                let (a, b) = (site_label(n), site_label(m));
                match xx_correlator(src, n, m) {
                    Ok(v) => out.push("xx", a.clone(), b.clone(), v, src.error_estimate()),
                    Err(e) => out.fail("xx", a.clone(), b.clone(), &e),
                }
                match zz_correlator(src, n, m) {
                    Ok(v) => out.push("zz", a, b, v, src.error_estimate()),
                    Err(e) => out.fail("zz", a, b, &e),
                }
            }
        }
        Observable::QdCcVsJ => qd_cc(out, src),
        Observable::FidelityVsJ | Observable::SpectrumScan => unreachable!("handled by evaluate"),
    }
}

fn discord_pair(src: &dyn TwoPointSource, n: Site, m: Site) -> anyhow::Result<(f64, f64)> {
    let state = two_qubit_rdm(src, n, m)?;
    Ok((quantum_discord(&state)?, classical_correlations(&state)?))
}

/// QD and CC, their ratios to the uniform ring (`j = 1`, same `M` and `h`), and
/// their base-10 logarithms.
fn qd_cc(out: &mut Emitter, src: &dyn TwoPointSource) {
    let s = out.sweep;
    let p = out.point;
    let reference = source(s, p.m, 1.0, p.h);
    for &(n, m) in &s.pairs {
        let (a, b) = (site_label(n), site_label(m));
        let (qd, cc) = match discord_pair(src, n, m) {
            Ok(v) => v,
            Err(e) => {
                out.fail("qd", a, b, &e);
                continue;
            }
        };
        let err = src.error_estimate();
        out.push("qd", a.clone(), b.clone(), qd, err);
        out.push("cc", a.clone(), b.clone(), cc, err);
        let norm = reference
            .as_ref()
            .map_err(|e| anyhow::anyhow!("{e}"))
            .and_then(|(r, _)| discord_pair(r.as_ref(), n, m));
        match norm {
            Ok((qd1, cc1)) => {
                out.push("qd_norm", a.clone(), b.clone(), qd / qd1, err);
                out.push("cc_norm", a.clone(), b.clone(), cc / cc1, err);
            }
            Err(e) => out.fail("qd_norm", a.clone(), b.clone(), &e),
        }
        out.push("log10_qd", a.clone(), b.clone(), qd.log10(), err);
        out.push("log10_cc", a, b, cc.log10(), err);
    }
}

fn fidelity(out: &mut Emitter) {
    let s = out.sweep;
    let p = out.point;
    let m = p.m.expect("fidelity runs on the finite engine");
    let report = ModelParams::new(m, p.j, p.h, s.boundary)
        .map_err(anyhow::Error::from)
        .and_then(|params| {
            let seg = segment_modes(m, p.h)?;
            Ok(ring_cut_fidelity_with(&params, &seg)?)
        });
    match report {
        Ok(r) => {
            out.flags = Flags {
                zero_mode: r.zero_mode_flag,
                degenerate: r.degenerate,
            };
            out.push("fidelity", String::new(), String::new(), r.total, 0.0);
            for (name, v) in [
                ("term_00", r.term_00),
                ("term_m", r.term_m),
                ("term_p", r.term_p),
                ("term_mp", r.term_mp),
            ] {
                out.push(name, String::new(), String::new(), v, 0.0);
            }
        }
        Err(e) => out.fail("fidelity", String::new(), String::new(), &e),
    }
}

fn side_label(side: BandSide) -> String {
    match side {
        BandSide::Below => "below".into(),
        BandSide::Above => "above".into(),
    }
}

/// Out-of-band single-particle energies and how many there are.
fn spectrum(out: &mut Emitter) {
    let s = out.sweep;
    let p = out.point;
    let found: anyhow::Result<Vec<(BandSide, f64)>> = match p.m {
        Some(m) => ModelParams::new(m, p.j, p.h, s.boundary)
            .map_err(anyhow::Error::from)
            .and_then(|params| {
                let g = ground_state(&params)?;
                out.flags = Flags {
                    zero_mode: g.zero_mode_flag(),
                    degenerate: g.degenerate,
                };
                Ok(bound_state_energies(&g.spectrum)
                    .into_iter()
                    .map(|b| (b.side, b.energy))
                    .collect())
            }),
        None => bound_state_poles(p.j, p.h)
            .map(|v| v.into_iter().map(|(e, side)| (side, e)).collect())
            .map_err(anyhow::Error::from),
    };
    match found {
        Ok(mut states) => {
            states.sort_by(|x, y| x.1.total_cmp(&y.1));
            out.push("bound_state_count", String::new(), String::new(), states.len() as f64, 0.0);
            for (side, e) in states {
                out.push("bound_state", side_label(side), String::new(), e, 0.0);
            }
        }
        Err(e) => out.fail("bound_state", String::new(), String::new(), &e),
    }
}
