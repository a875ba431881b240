//! Fermion correlation matrix and spin correlators through Wick's theorem.
//!
//! With `A_l = c+_l + c_l` and `B_l = c+_l - c_l` the Jordan-Wigner strings cancel in
//! neighbouring products, `sx_l sx_{l+1} = B_l A_{l+1}` and
//! `sy_l sy_{l+1} = -A_l B_{l+1}`, so for `n < m` at distance `r`
//!
//! ```text
//! <sx_n sx_m> = det [ <B_{n+p} A_{n+1+q}> ]          <B_a A_b> = 2 C_ab - delta_ab
//! <sy_n sy_m> = (-1)^r det [ <A_{n+p} B_{n+1+q}> ]   <A_a B_b> = delta_ab - 2 C_ab
//! ```
//!
//! with `p, q = 0 .. r-1`, and `<sz_n sz_m> = (2C_nn - 1)(2C_mm - 1) - 4 C_nm^2`.

use nalgebra::DMatrix;
use rustfft::{num_complex::Complex, FftPlanner};

use crate::linalg::determinant;
use crate::model::{pos_to_site, site_to_pos, Boundary, ModelParams, Site};
use crate::spectrum::{ground_state, GroundState, Occupation, Spectrum};
use crate::{Error, Result};

/// Anything that can supply ground-state contractions `<c+_a c_b>`.
///
/// Strings in the spin correlators run from the lower to the higher site label;
/// on rings that never crosses the wrap bond, so no parity string appears.
pub trait TwoPointSource {
    fn contraction(&self, a: Site, b: Site) -> Result<f64>;

    /// A mode sat at the Fermi level when the state was built.
    fn zero_mode_flag(&self) -> bool;

    /// Largest numerical error estimate carried by the contractions.
    fn error_estimate(&self) -> f64 {
        0.0
    }

    /// `<n_a n_b>` and `<(1 - n_a)(1 - n_b)>` for `a != b`.
    ///
    /// Both are 2x2 determinants of contractions. Sources that hold the modes
    /// override this with a form that keeps exact zeros exact.
    fn pair_occupation(&self, a: Site, b: Site) -> Result<PairOccupation> {
        let (caa, cbb, cab) = (self.contraction(a, a)?, self.contraction(b, b)?, self.contraction(a, b)?);
        Ok(PairOccupation {
            both: caa * cbb - cab * cab,
            neither: (1.0 - caa) * (1.0 - cbb) - cab * cab,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOccupation {
    /// Both sites filled (both spins up).
    pub both: f64,
    /// Both sites empty (both spins down).
    pub neither: f64,
}

/// Gram determinant `|u|^2 |w|^2 - (u.w)^2` of two rows as a sum of squared 2x2
/// minors, which is never negative and vanishes exactly for a single column.
fn gram2(m: &DMatrix<f64>, a: usize, b: usize) -> f64 {
    let k = m.ncols();
    let mut sum = 0.0;
    for i in 0..k {
        let (ai, bi) = (m[(a, i)], m[(b, i)]);
        for l in i + 1..k {
            let minor = ai * m[(b, l)] - m[(a, l)] * bi;
            sum += minor * minor;
        }
    }
    sum
}

#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    c: DMatrix<f64>,
    zero_mode_flag: bool,
    /// Filled and empty modes, when the matrix was built from a spectrum.
    modes: Option<(DMatrix<f64>, DMatrix<f64>)>,
}

impl CorrelationMatrix {
    pub fn from_matrix(c: DMatrix<f64>, zero_mode_flag: bool) -> Self {
        Self {
            c,
            zero_mode_flag,
            modes: None,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn n_sites(&self) -> usize {
        self.c.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.c.trace()
    }

    fn half_length(&self) -> usize {
        self.c.nrows() / 2
    }

    pub fn pos(&self, s: Site) -> Result<usize> {
        site_to_pos(s, self.half_length())
    }

    pub fn site(&self, p: usize) -> Result<Site> {
        pos_to_site(p, self.half_length())
    }
}

impl TwoPointSource for CorrelationMatrix {
    fn contraction(&self, a: Site, b: Site) -> Result<f64> {
        Ok(self.c[(self.pos(a)?, self.pos(b)?)])
    }

    fn zero_mode_flag(&self) -> bool {
        self.zero_mode_flag
    }

    fn pair_occupation(&self, a: Site, b: Site) -> Result<PairOccupation> {
        let (pa, pb) = (self.pos(a)?, self.pos(b)?);
        match &self.modes {
            Some((filled, empty)) => Ok(PairOccupation {
                both: gram2(filled, pa, pb),
                neither: gram2(empty, pa, pb),
            }),
            None => {
                let (caa, cbb, cab) = (self.c[(pa, pa)], self.c[(pb, pb)], self.c[(pa, pb)]);
                Ok(PairOccupation {
                    both: caa * cbb - cab * cab,
                    neither: (1.0 - caa) * (1.0 - cbb) - cab * cab,
                })
            }
        }
    }
}

/// `C = sum over filled modes of v v^T`.
pub fn correlation_matrix(spec: &Spectrum, occ: &Occupation) -> CorrelationMatrix {
    let idx: Vec<usize> = occ.occupied_indices().collect();
    let v = spec.eigenvectors.select_columns(idx.iter());
    let rest: Vec<usize> = (0..spec.len()).filter(|&i| !occ.occupied[i]).collect();
    let w = spec.eigenvectors.select_columns(rest.iter());
    let mut c = &v * v.transpose();
    // Enforce exact symmetry; the product is symmetric up to rounding.
    let n = c.nrows();
    for i in 0..n {
        for k in 0..i {
            let x = 0.5 * (c[(i, k)] + c[(k, i)]);
            c[(i, k)] = x;
            c[(k, i)] = x;
        }
    }
    CorrelationMatrix {
        c,
        zero_mode_flag: occ.zero_mode_flag,
        modes: Some((v, w)),
    }
}

pub fn ground_state_correlations(g: &GroundState) -> CorrelationMatrix {
    correlation_matrix(&g.spectrum, &g.occupation)
}

/// `<sz_n> = 2 C_nn - 1`.
pub fn magnetization<S: TwoPointSource + ?Sized>(src: &S, n: Site) -> Result<f64> {
    Ok(2.0 * src.contraction(n, n)? - 1.0)
}

fn distinct(n: Site, m: Site) -> Result<(Site, Site)> {
    match n.cmp(&m) {
        std::cmp::Ordering::Less => Ok((n, m)),
        std::cmp::Ordering::Greater => Ok((m, n)),
        std::cmp::Ordering::Equal => Err(Error::CoincidentSites(n)),
    }
}

pub fn zz_correlator<S: TwoPointSource + ?Sized>(src: &S, n: Site, m: Site) -> Result<f64> {
    let (n, m) = distinct(n, m)?;
    let cnm = src.contraction(n, m)?;
    Ok(magnetization(src, n)? * magnetization(src, m)? - 4.0 * cnm * cnm)
}

pub fn xx_correlator<S: TwoPointSource + ?Sized>(src: &S, n: Site, m: Site) -> Result<f64> {
    let (n, m) = distinct(n, m)?;
    let r = n.distance(m);
    let mut g = DMatrix::zeros(r, r);
    for p in 0..r {
        for q in 0..r {
            let a = n.offset(p as i64);
            let b = n.offset(q as i64 + 1);
            let delta = if a == b { 1.0 } else { 0.0 };
            g[(p, q)] = 2.0 * src.contraction(a, b)? - delta;
        }
    }
    Ok(determinant(&g))
}

pub fn yy_correlator<S: TwoPointSource + ?Sized>(src: &S, n: Site, m: Site) -> Result<f64> {
    let (n, m) = distinct(n, m)?;
    let r = n.distance(m);
    let mut g = DMatrix::zeros(r, r);
    for p in 0..r {
        for q in 0..r {
            let a = n.offset(p as i64);
            let b = n.offset(q as i64 + 1);
            let delta = if a == b { 1.0 } else { 0.0 };
            g[(p, q)] = delta - 2.0 * src.contraction(a, b)?;
        }
    }
    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * determinant(&g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinCorrelators {
    pub n: Site,
    pub m: Site,
    pub sx_sx: f64,
    pub sz_sz: f64,
    pub mz_n: f64,
    pub mz_m: f64,
}

pub fn spin_correlators<S: TwoPointSource + ?Sized>(src: &S, n: Site, m: Site) -> Result<SpinCorrelators> {
    Ok(SpinCorrelators {
        n,
        m,
        sx_sx: xx_correlator(src, n, m)?,
        sz_sz: zz_correlator(src, n, m)?,
        mz_n: magnetization(src, n)?,
        mz_m: magnetization(src, m)?,
    })
}

/// `<s^a_{b-1/2} s^a_{b+1/2}>` on bond `b`.
pub fn bond_correlator<S: TwoPointSource + ?Sized>(src: &S, axis: Axis, b: i64) -> Result<f64> {
    let (n, m) = Site::bond(b);
    match axis {
        Axis::X => xx_correlator(src, n, m),
        Axis::Z => zz_correlator(src, n, m),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondValue {
    pub bond: i64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BondProfile {
    pub values: Vec<BondValue>,
    pub zero_mode_flag: bool,
    pub error_estimate: f64,
}

pub fn profile_from_source<S: TwoPointSource + ?Sized>(
    src: &S,
    axis: Axis,
    bonds: &[i64],
) -> Result<BondProfile> {
    let values = bonds
        .iter()
        .map(|&b| {
            Ok(BondValue {
                bond: b,
                value: bond_correlator(src, axis, b)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BondProfile {
        values,
        zero_mode_flag: src.zero_mode_flag(),
        error_estimate: src.error_estimate(),
    })
}

/// Finite-size bond profile in the boundary mode of `params`.
pub fn bond_profile(params: &ModelParams, axis: Axis, bonds: &[i64]) -> Result<BondProfile> {
    let g = ground_state(params)?;
    if g.degenerate && params.boundary() == Boundary::RingParityExact {
        return Err(Error::DegenerateGroundState(0.0));
    }
    profile_from_source(&ground_state_correlations(&g), axis, bonds)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominantPeriod {
    /// FFT bin with the largest magnitude, `1 ..= len/2`.
    pub bin: usize,
    pub len: usize,
    /// Cycles per bond, `bin / len`.
    pub frequency: f64,
    pub period: f64,
}

/// Strongest non-constant Fourier component of a sequence after removing its mean.
pub fn dominant_period(values: &[f64]) -> Option<DominantPeriod> {
    let len = values.len();
    if len < 2 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / len as f64;
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let (bin, _) = buf
        .iter()
        .enumerate()
        .take(len / 2 + 1)
        .skip(1)
        .map(|(k, c)| (k, c.norm()))
        .fold((1, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    let frequency = bin as f64 / len as f64;
    Some(DominantPeriod {
        bin,
        len,
        frequency,
        period: 1.0 / frequency,
    })
}
