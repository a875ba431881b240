//! Infinite-chain solution: free lattice Green function, impurity T-matrix,
//! distorted band modes, localized modes and contractions by quadrature.
//!
//! Conventions follow [`crate::model`]: hopping `-1`, defect `-j` between `-1/2` and
//! `+1/2`, band `eps(k) = -2 cos k - 2h` on `[-2h-2, -2h+2]`. A mode with wavevector
//! `k` is the stationary scattering state
//!
//! ```text
//! phi_k(n) = exp(-i k n) (1 + f(k, n))
//! ```
//!
//! whose incoming part `exp(-i k n)` arrives from the side where `k n > 0`. With
//! `D = 2 sin|k| - i (j^2 - 1) exp(i|k|)` the distortion is
//!
//! ```text
//! f(k, n) = i (j^2 - 1) exp(2 i k n) / D                        if k n > 0
//! f(k, n) = (2 (j - 1) sin|k| + i (j^2 - 1) exp(i|k|)) / D      if k n < 0
//! ```
//!
//! i.e. reflection amplitude `i (j^2 - 1) / D` and transmission `2 j sin|k| / D`.
//! For `j > 1` two modes split off the band at `-2h -+ (j + 1/j)`; their amplitudes
//! decay as `exp(-q |n|)` with `q = ln j`.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::corr::TwoPointSource;
use crate::model::Site;
use crate::quad::Integrator;
use crate::spectrum::{BandSide, ZERO_MODE_TOL};
use crate::{Error, Result};

/// `|x^2 - 1|` below this is treated as a band edge, where `G0` diverges.
pub const EDGE_TOL: f64 = 1e-12;

/// Determinant magnitude below which the T-matrix is reported as singular.
pub const POLE_TOL: f64 = 1e-12;

/// Bisection stops once the bracket is narrower than this.
pub const ROOT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Retarded,
    Advanced,
}

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// `(x, s)` with `x = z/2 + h` and `s` the root of `x^2 - 1` for which
/// `|-x + s| <= 1`.
fn green_root(z: Complex64, h: f64, branch: Branch) -> Result<(Complex64, Complex64)> {
    let x = z / 2.0 + h;
    let w = x * x - 1.0;
    if w.norm() < EDGE_TOL {
        return Err(Error::BandEdge {
            z: z.re,
            distance: w.norm(),
        });
    }
    let s = if z.im == 0.0 {
        let xr = x.re;
        if xr.abs() > 1.0 {
            Complex64::new(xr.signum() * (xr * xr - 1.0).sqrt(), 0.0)
        } else {
            let root = (1.0 - xr * xr).sqrt();
            match branch {
                Branch::Retarded => Complex64::new(0.0, root),
                Branch::Advanced => Complex64::new(0.0, -root),
            }
        }
    } else {
        let s = w.sqrt();
        if (-x + s).norm() > 1.0 {
            -s
        } else {
            s
        }
    };
    Ok((x, s))
}

/// Free Green function `<n| (z - H0)^-1 |m>`; retarded on the real axis inside the band.
pub fn g0(n: Site, m: Site, z: Complex64, h: f64) -> Result<Complex64> {
    g0_branch(n, m, z, h, Branch::Retarded)
}

pub fn g0_branch(n: Site, m: Site, z: Complex64, h: f64, branch: Branch) -> Result<Complex64> {
    let (x, s) = green_root(z, h, branch)?;
    let lambda = -x + s;
    Ok(lambda.powu(n.distance(m) as u32) / (2.0 * s))
}

/// The impurity-block T-matrix `(1 - V G0)^-1 V`, `V = (1 - j) sigma_x` on sites
/// `(-1/2, +1/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TMatrix {
    pub block: [[Complex64; 2]; 2],
    /// Spectral radius of `V G0` on the impurity block. Values at or above one mean
    /// the Born series diverges and the block is its analytic continuation.
    pub series_radius: f64,
}

fn impurity_sites() -> (Site, Site) {
    Site::bond(0)
}

/// `(G0(-1/2, -1/2), G0(-1/2, +1/2))` at `z`.
fn impurity_green(z: Complex64, h: f64, branch: Branch) -> Result<(Complex64, Complex64)> {
    let (a, b) = impurity_sites();
    Ok((g0_branch(a, a, z, h, branch)?, g0_branch(a, b, z, h, branch)?))
}

pub fn t_matrix(z: Complex64, j: f64, h: f64) -> Result<TMatrix> {
    t_matrix_branch(z, j, h, Branch::Retarded)
}

pub fn t_matrix_branch(z: Complex64, j: f64, h: f64, branch: Branch) -> Result<TMatrix> {
    let v = 1.0 - j;
    let (g_on, g_off) = impurity_green(z, h, branch)?;
    // 1 - V G0 with V = v sigma_x and G0 = [[g_on, g_off], [g_off, g_on]].
    let m00 = 1.0 - v * g_off;
    let m01 = -v * g_on;
    let det = m00 * m00 - m01 * m01;
    if det.norm() < POLE_TOL {
        return Err(Error::TMatrixPole(z.re));
    }
    // (1 - V G0)^-1 = [[m00, -m01], [-m01, m00]] / det, times V = [[0, v], [v, 0]].
    let t_on = -m01 * v / det;
    let t_off = m00 * v / det;
    let series_radius = v.abs() * (g_off + g_on).norm().max((g_off - g_on).norm());
    Ok(TMatrix {
        block: [[t_on, t_off], [t_off, t_on]],
        series_radius,
    })
}

/// `det(1 - V G0(z))` on the impurity block, real for real `z` outside the band.
pub fn impurity_determinant(z: Complex64, j: f64, h: f64) -> Result<Complex64> {
    let v = 1.0 - j;
    let (g_on, g_off) = impurity_green(z, h, Branch::Retarded)?;
    Ok((1.0 - v * (g_off + g_on)) * (1.0 - v * (g_off - g_on)))
}

/// Full Green function `G0 + G0 T G0` between two sites.
pub fn full_green(n: Site, m: Site, z: Complex64, j: f64, h: f64) -> Result<Complex64> {
    let (a, b) = impurity_sites();
    let t = t_matrix(z, j, h)?;
    let left = [g0(n, a, z, h)?, g0(n, b, z, h)?];
    let right = [g0(a, m, z, h)?, g0(b, m, z, h)?];
    let mut out = g0(n, m, z, h)?;
    for p in 0..2 {
        for q in 0..2 {
            out += left[p] * t.block[p][q] * right[q];
        }
    }
    Ok(out)
}

/// Distance from the band edge beyond which `bound_state_poles` stops looking.
pub const POLE_SCAN_MAX: f64 = 1e8;

/// Real poles of the full Green function outside the band, found by scanning
/// `det(1 - V G0)` outward from each band edge and bisecting sign changes.
pub fn bound_state_poles(j: f64, h: f64) -> Result<Vec<(f64, BandSide)>> {
    if !j.is_finite() || j < 0.0 {
        return Err(Error::InvalidDefect(j));
    }
    if !(h.is_finite() && (2.0 * h).is_finite()) {
        return Err(Error::InvalidField(h));
    }
    if j > 1.0 && j + 1.0 / j >= POLE_SCAN_MAX {
        return Err(Error::PoleOutOfRange { j, max: POLE_SCAN_MAX });
    }
    let mut out = Vec::new();
    for side in [BandSide::Below, BandSide::Above] {
        let edge = match side {
            BandSide::Below => -2.0 * h - 2.0,
            BandSide::Above => -2.0 * h + 2.0,
        };
        let dir = match side {
            BandSide::Below => -1.0,
            BandSide::Above => 1.0,
        };
        let det = |delta: f64| -> Result<f64> {
            let z = edge + dir * delta;
            let d = impurity_determinant(Complex64::new(z, 0.0), j, h)?.re;
            if d.is_finite() {
                Ok(d)
            } else {
                Err(Error::TMatrixPole(z))
            }
        };
        let mut lo = 4.0 * EDGE_TOL;
        let mut f_lo = det(lo)?;
        while lo < POLE_SCAN_MAX {
            let hi = lo * 1.5;
            let f_hi = det(hi)?;
            if f_lo == 0.0 {
                out.push((edge + dir * lo, side));
            } else if f_lo.signum() != f_hi.signum() && f_hi != 0.0 {
                let (mut a, mut b, mut fa) = (lo, hi, f_lo);
                while b - a > ROOT_TOL * b.max(1.0) {
                    let mid = 0.5 * (a + b);
                    let fm = det(mid)?;
                    if fm == 0.0 {
                        a = mid;
                        b = mid;
                        break;
                    }
                    if fm.signum() == fa.signum() {
                        a = mid;
                        fa = fm;
                    } else {
                        b = mid;
                    }
                }
                out.push((edge + dir * 0.5 * (a + b), side));
            }
            lo = hi;
            f_lo = f_hi;
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Closed-form bound-state energy `-2h -+ (j + 1/j)` (below / above), `j > 1`.
pub fn bound_state_energy(side: BandSide, j: f64, h: f64) -> Result<f64> {
    if j <= 1.0 {
        return Err(Error::NoLocalizedMode(j));
    }
    let split = j + 1.0 / j;
    Ok(match side {
        BandSide::Below => -2.0 * h - split,
        BandSide::Above => -2.0 * h + split,
    })
}

fn check_wavevector(k: f64) -> Result<f64> {
    let s = k.abs().sin();
    if !(k.abs() <= PI) || k == 0.0 || s <= 0.0 || k.abs() == PI {
        return Err(Error::BandEdgeWavevector(k));
    }
    Ok(s)
}

pub fn distortion_f(k: f64, n: Site, j: f64) -> Result<Complex64> {
    let s = check_wavevector(k)?;
    let ka = k.abs();
    let g = j * j - 1.0;
    let phase = Complex64::from_polar(1.0, ka);
    let d = 2.0 * s - i() * g * phase;
    if k * n.value() > 0.0 {
        Ok(i() * g * Complex64::from_polar(1.0, 2.0 * k * n.value()) / d)
    } else {
        Ok((2.0 * (j - 1.0) * s + i() * g * phase) / d)
    }
}

/// `phi_k(n) = exp(-i k n) (1 + f(k, n))`.
pub fn scattering_mode(k: f64, n: Site, j: f64) -> Result<Complex64> {
    let f = distortion_f(k, n, j)?;
    Ok(Complex64::from_polar(1.0, -k * n.value()) * (1.0 + f))
}

/// Scattering state built from the retarded T-matrix for the incoming plane wave
/// `exp(i k n)`: `psi = (1 + G0+ T+) |k>`.
pub fn scattering_state_from_t(k: f64, n: Site, j: f64, h: f64) -> Result<Complex64> {
    check_wavevector(k)?;
    let energy = Complex64::new(-2.0 * k.cos() - 2.0 * h, 0.0);
    let (a, b) = impurity_sites();
    let t = t_matrix(energy, j, h)?;
    let plane = |s: Site| Complex64::from_polar(1.0, k * s.value());
    let gl = [g0(n, a, energy, h)?, g0(n, b, energy, h)?];
    let pw = [plane(a), plane(b)];
    let mut out = plane(n);
    for p in 0..2 {
        for q in 0..2 {
            out += gl[p] * t.block[p][q] * pw[q];
        }
    }
    Ok(out)
}

/// Amplitude of a localized mode at site `n`: `sqrt(sinh q) exp(-q|n|)`, uniform in
/// sign below the band and staggered as `(-1)^(n + 1/2)` above it.
pub fn localized_amplitude(side: BandSide, j: f64, n: Site) -> Result<f64> {
    if !(j > 1.0) {
        return Err(Error::NoLocalizedMode(j));
    }
    let q = j.ln();
    let base = q.sinh().sqrt() * (-q * n.abs_value()).exp();
    Ok(match side {
        BandSide::Below => base,
        BandSide::Above => {
            let parity = (n.twice() + 1) / 2;
            if parity.rem_euclid(2) == 0 {
                base
            } else {
                -base
            }
        }
    })
}

/// Upper end `k_o` of the filled wavevectors `|k| < k_o`, where `eps(k) < 0`.
pub fn occupied_wavevector(h: f64) -> f64 {
    if h >= 1.0 {
        PI
    } else if h <= -1.0 {
        0.0
    } else {
        (-h).acos()
    }
}

/// Filled localized modes at field `h`, and whether any sits at the Fermi level.
pub fn occupied_bound_states(j: f64, h: f64) -> (Vec<BandSide>, bool) {
    if !(j > 1.0) {
        return (vec![], false);
    }
    let mut out = Vec::new();
    let mut at_fermi = false;
    for side in [BandSide::Below, BandSide::Above] {
        let e = bound_state_energy(side, j, h).expect("j > 1");
        if e < -ZERO_MODE_TOL {
            out.push(side);
        } else if e.abs() <= ZERO_MODE_TOL {
            at_fermi = true;
        }
    }
    (out, at_fermi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TlEntry {
    pub value: f64,
    pub error: f64,
}

fn band_integral(
    integrand: impl Fn(f64) -> Result<f64>,
    k_max: f64,
    integrator: &Integrator,
) -> Result<TlEntry> {
    if k_max <= 0.0 {
        return Ok(TlEntry {
            value: 0.0,
            error: 0.0,
        });
    }
    let mut failure = None;
    let r = integrator.integrate(
        |k| match integrand(k) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        -k_max,
        k_max,
        &[0.0],
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(TlEntry {
        value: r.value / (2.0 * PI),
        error: r.error / (2.0 * PI),
    })
}

/// `<c+_n c_m>` in the infinite-chain ground state.
pub fn tl_correlation_entry(n: Site, m: Site, j: f64, h: f64) -> Result<TlEntry> {
    tl_correlation_entry_with(n, m, j, h, &Integrator::default())
}

pub fn tl_correlation_entry_with(
    n: Site,
    m: Site,
    j: f64,
    h: f64,
    integrator: &Integrator,
) -> Result<TlEntry> {
    let band = band_integral(
        |k| {
            let a = scattering_mode(k, n, j)?;
            let b = scattering_mode(k, m, j)?;
            Ok((a.conj() * b).re)
        },
        occupied_wavevector(h),
        integrator,
    )?;
    let (bound, _) = occupied_bound_states(j, h);
    let mut value = band.value;
    for side in bound {
        value += localized_amplitude(side, j, n)? * localized_amplitude(side, j, m)?;
    }
    Ok(TlEntry {
        value,
        error: band.error,
    })
}

/// `int dk/2pi |1 + f(k, n)|^2` over the whole band plus the localized weight at `n`.
pub fn completeness(n: Site, j: f64) -> Result<TlEntry> {
    let band = band_integral(
        |k| Ok(scattering_mode(k, n, j)?.norm_sqr()),
        PI,
        &Integrator::default(),
    )?;
    let mut value = band.value;
    if j > 1.0 {
        for side in [BandSide::Below, BandSide::Above] {
            value += localized_amplitude(side, j, n)?.powi(2);
        }
    }
    Ok(TlEntry {
        value,
        error: band.error,
    })
}

/// Contractions among a contiguous window of sites of the infinite chain.
#[derive(Debug, Clone)]
pub struct TlCorrelations {
    j: f64,
    h: f64,
    first: Site,
    len: usize,
    entries: Vec<f64>,
    max_error: f64,
    zero_mode_flag: bool,
}

impl TlCorrelations {
    /// All contractions between sites `first ..= last`.
    pub fn window(j: f64, h: f64, first: Site, last: Site) -> Result<Self> {
        if !j.is_finite() || j < 0.0 {
            return Err(Error::InvalidDefect(j));
        }
        if !h.is_finite() {
            return Err(Error::InvalidField(h));
        }
        let (first, last) = if first <= last { (first, last) } else { (last, first) };
        let len = first.distance(last) + 1;
        let mut entries = vec![0.0; len * len];
        let mut max_error: f64 = 0.0;
        let integrator = Integrator::default();
        for a in 0..len {
            for b in a..len {
                let e = tl_correlation_entry_with(
                    first.offset(a as i64),
                    first.offset(b as i64),
                    j,
                    h,
                    &integrator,
                )?;
                entries[a * len + b] = e.value;
                entries[b * len + a] = e.value;
                max_error = max_error.max(e.error);
            }
        }
        let (_, zero_mode_flag) = occupied_bound_states(j, h);
        Ok(Self {
            j,
            h,
            first,
            len,
            entries,
            max_error,
            zero_mode_flag,
        })
    }

    pub fn defect(&self) -> f64 {
        self.j
    }

    pub fn field(&self) -> f64 {
        self.h
    }

    fn index(&self, s: Site) -> Result<usize> {
        let off = (s.twice() - self.first.twice()) / 2;
        if off < 0 || off as usize >= self.len {
            return Err(Error::SiteOutOfRange {
                site: s,
                n_sites: self.len,
            });
        }
        Ok(off as usize)
    }
}

impl TwoPointSource for TlCorrelations {
    fn contraction(&self, a: Site, b: Site) -> Result<f64> {
        let (p, q) = (self.index(a)?, self.index(b)?);
        Ok(self.entries[p * self.len + q])
    }

    fn zero_mode_flag(&self) -> bool {
        self.zero_mode_flag
    }

    fn error_estimate(&self) -> f64 {
        self.max_error
    }
}

/// Infinite-chain contractions computed on first use and cached, for callers that
/// touch only a sparse set of site pairs (nearest-neighbour profiles, far pairs).
#[derive(Debug)]
pub struct TlLazy {
    j: f64,
    h: f64,
    integrator: Integrator,
    cache: RefCell<HashMap<(i64, i64), f64>>,
    max_error: Cell<f64>,
    zero_mode_flag: bool,
}

impl TlLazy {
    pub fn new(j: f64, h: f64) -> Result<Self> {
        if !j.is_finite() || j < 0.0 {
            return Err(Error::InvalidDefect(j));
        }
        if !h.is_finite() {
            return Err(Error::InvalidField(h));
        }
        Ok(Self {
            j,
            h,
            integrator: Integrator::default(),
            cache: RefCell::new(HashMap::new()),
            max_error: Cell::new(0.0),
            zero_mode_flag: occupied_bound_states(j, h).1,
        })
    }

    pub fn defect(&self) -> f64 {
        self.j
    }

    pub fn field(&self) -> f64 {
        self.h
    }
}

impl TwoPointSource for TlLazy {
    fn contraction(&self, a: Site, b: Site) -> Result<f64> {
        let key = (a.twice().min(b.twice()), a.twice().max(b.twice()));
        if let Some(&v) = self.cache.borrow().get(&key) {
            return Ok(v);
        }
        let e = tl_correlation_entry_with(a, b, self.j, self.h, &self.integrator)?;
        self.max_error.set(self.max_error.get().max(e.error));
        self.cache.borrow_mut().insert(key, e.value);
        Ok(e.value)
    }

    fn zero_mode_flag(&self) -> bool {
        self.zero_mode_flag
    }

    fn error_estimate(&self) -> f64 {
        self.max_error.get()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn s(x: f64) -> Site {
        Site::new(x).unwrap()
    }

    #[test]
    fn resolvent_asymptotics() {
        let z = Complex64::new(1e6, 0.0);
        let g = g0(s(0.5), s(0.5), z, 0.3).unwrap();
        assert_relative_eq!(g.re * 1e6, 1.0, max_relative = 1e-5);
    }

    #[test]
    fn green_matches_spectral_integral_outside_band() {
        for (z, h, d) in [(2.7, 0.0, 0usize), (-3.1, 0.0, 1), (4.0, -0.8, 3), (-4.5, 0.6, 2)] {
            let closed = g0(s(0.5), s(0.5).offset(d as i64), Complex64::new(z, 0.0), h).unwrap();
            assert!(closed.im == 0.0);
            let q = Integrator::default()
                .integrate(
                    |k| (k * d as f64).cos() / (z + 2.0 * k.cos() + 2.0 * h),
                    -PI,
                    PI,
                    &[],
                )
                .unwrap();
            assert!((closed.re - q.value / (2.0 * PI)).abs() < 1e-10, "z={z} d={d}");
        }
    }

    #[test]
    fn green_decays_geometrically() {
        let z = Complex64::new(0.3, 0.2);
        let g00 = g0(s(0.5), s(0.5), z, 0.1).unwrap();
        let g01 = g0(s(0.5), s(1.5), z, 0.1).unwrap();
        let ratio = (g01 / g00).norm();
        assert!(ratio <= 1.0);
        for d in 2..8 {
            let gd = g0(s(0.5), s(0.5).offset(d), z, 0.1).unwrap();
            assert!(((gd / g00).norm().ln() - d as f64 * ratio.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn band_edge_is_rejected() {
        assert!(matches!(
            g0(s(0.5), s(0.5), Complex64::new(2.0, 0.0), 0.0),
            Err(Error::BandEdge { .. })
        ));
    }

    #[test]
    fn t_matrix_vanishes_without_defect() {
        let t = t_matrix(Complex64::new(0.3, 0.0), 1.0, 0.2).unwrap();
        assert!(t.block.iter().flatten().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn poles_sit_at_j_plus_inverse_j() {
        for (j, h) in [(2.0, 0.0), (1.5, 0.5), (11.0, -0.3)] {
            let poles = bound_state_poles(j, h).unwrap();
            assert_eq!(poles.len(), 2, "j={j}");
            let below = bound_state_energy(BandSide::Below, j, h).unwrap();
            let above = bound_state_energy(BandSide::Above, j, h).unwrap();
            assert!((poles[0].0 - below).abs() < 1e-8);
            assert!((poles[1].0 - above).abs() < 1e-8);
        }
        for j in [0.0, 0.5, 0.99, 1.0] {
            assert!(bound_state_poles(j, 0.2).unwrap().is_empty());
        }
    }

    #[test]
    fn distortion_limits() {
        for k in [0.3, -1.2, 2.9] {
            for n in [-2.5, -0.5, 0.5, 3.5] {
                assert!(distortion_f(k, s(n), 1.0).unwrap().norm() < 1e-15);
            }
        }
        // Complete backscattering: the transmitted side carries no amplitude.
        for j in [0.0, 1e9] {
            let f = distortion_f(0.7, s(-1.5), j).unwrap();
            assert!((f + 1.0).norm() < 1e-8, "j={j} f={f}");
        }
        let f = distortion_f(0.7, s(0.5), 1e9).unwrap();
        assert!((f + 1.0).norm() < 1e-8);
        assert!(distortion_f(0.0, s(0.5), 2.0).is_err());
        assert!(distortion_f(PI, s(0.5), 2.0).is_err());
    }

    #[test]
    fn localized_mode_shape() {
        let e = std::f64::consts::E;
        let a = localized_amplitude(BandSide::Below, e, s(0.5)).unwrap();
        let b = localized_amplitude(BandSide::Below, e, s(1.5)).unwrap();
        assert!((b / a - 1.0 / e).abs() < 1e-15);
        let up = localized_amplitude(BandSide::Above, 2.0, s(0.5)).unwrap();
        let um = localized_amplitude(BandSide::Above, 2.0, s(-0.5)).unwrap();
        assert!(up < 0.0 && um > 0.0);
        assert!(localized_amplitude(BandSide::Below, 1.0, s(0.5)).is_err());
    }

    #[test]
    fn uniform_chain_contractions() {
        let d = tl_correlation_entry(s(0.5), s(0.5), 1.0, 0.0).unwrap();
        assert!((d.value - 0.5).abs() < 1e-10);
        let c = tl_correlation_entry(s(0.5), s(1.5), 1.0, 0.0).unwrap();
        assert!((c.value - 1.0 / PI).abs() < 1e-10);
        let h = 0.4;
        let d = tl_correlation_entry(s(-3.5), s(-3.5), 1.0, h).unwrap();
        assert!((d.value - (-h).acos() / PI).abs() < 1e-10);
    }
}
