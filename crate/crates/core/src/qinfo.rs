//! Two-site reduced states and their correlation measures.
//!
//! States are 4x4 density matrices in the basis `|ab>` with index `2a + b`, where
//! `a` is the first site, `b` the second, and `0` means spin up (`sz = +1`).
//! Entropies are in bits. Classical correlations and discord use projective
//! measurements on the second site.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Complex, Matrix2, Matrix4};
use num_complex::Complex64;

use crate::corr::{magnetization, xx_correlator, yy_correlator, zz_correlator, TwoPointSource};
use crate::model::Site;
use crate::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues down to `-POSITIVITY_TOL` are clipped to zero.
pub const POSITIVITY_TOL: f64 = 1e-10;
pub const X_STRUCTURE_TOL: f64 = 1e-10;

const THETA_GRID: usize = 201;
const GOLDEN_TOL: f64 = 1e-10;
const GOLDEN_MAX_STEPS: usize = 200;
/// Allowed change of the conditional entropy with the measurement azimuth.
const AZIMUTH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Assembled from free-fermion contractions.
    FreeFermion,
    /// Partial trace of an exactly diagonalized many-body state.
    ExactDiagonalization,
    /// Supplied directly.
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: Matrix4<Complex64>,
    sites: Option<(Site, Site)>,
    provenance: Provenance,
}

/// The one- and two-point spin expectation values that fix a U(1)-symmetric pair state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCorrelators {
    pub z_a: f64,
    pub z_b: f64,
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    /// Population of both spins up.
    pub up_up: f64,
    /// Population of both spins down.
    pub down_down: f64,
}

impl PairCorrelators {
    /// Fill the corner populations from the moments themselves.
    pub fn from_moments(z_a: f64, z_b: f64, xx: f64, yy: f64, zz: f64) -> Self {
        Self {
            z_a,
            z_b,
            xx,
            yy,
            zz,
            up_up: 0.25 * (1.0 + z_a + z_b + zz),
            down_down: 0.25 * (1.0 - z_a - z_b + zz),
        }
    }
}

fn c(re: f64) -> Complex64 {
    Complex::new(re, 0.0)
}

fn pauli() -> [Matrix2<Complex64>; 4] {
    let o = c(0.0);
    let l = c(1.0);
    let i = Complex::new(0.0, 1.0);
    [
        Matrix2::new(l, o, o, l),
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(l, o, o, -l),
    ]
}

impl TwoQubitState {
    pub fn new(rho: Matrix4<Complex64>, sites: Option<(Site, Site)>, provenance: Provenance) -> Result<Self> {
        let herm = (rho - rho.adjoint()).camax();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = rho.trace();
        if (tr - c(1.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let low = hermitian_eigenvalues4(&rho).into_iter().fold(f64::INFINITY, f64::min);
        if low < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("eigenvalue {low:e} below zero")));
        }
        for r in 0..4 {
            for k in 0..4 {
                if r != k && r + k != 3 && rho[(r, k)].norm() > X_STRUCTURE_TOL {
                    return Err(Error::InvalidState(format!(
                        "entry ({r}, {k}) = {} breaks the X structure",
                        rho[(r, k)]
                    )));
                }
            }
        }
        Ok(Self {
            rho,
            sites,
            provenance,
        })
    }

    /// `rho = (1/4) sum <s^a s^b> s^a (x) s^b` with the cross terms absent, except
    /// that the two corner populations are taken from `up_up` and `down_down`.
    pub fn from_correlators(
        k: PairCorrelators,
        sites: Option<(Site, Site)>,
        provenance: Provenance,
    ) -> Result<Self> {
        let p = pauli();
        let terms = [
            (1.0, 0, 0),
            (k.z_a, 3, 0),
            (k.z_b, 0, 3),
            (k.xx, 1, 1),
            (k.yy, 2, 2),
            (k.zz, 3, 3),
        ];
        let mut rho = Matrix4::zeros();
        for (w, a, b) in terms {
            rho += p[a].kronecker(&p[b]) * c(0.25 * w);
        }
        rho[(0, 0)] = c(k.up_up);
        rho[(3, 3)] = c(k.down_down);
        Self::new(rho, sites, provenance)
    }

    pub fn bell_psi_plus() -> Self {
        let h = c(0.5);
        let mut rho = Matrix4::zeros();
        rho[(1, 1)] = h;
        rho[(1, 2)] = h;
        rho[(2, 1)] = h;
        rho[(2, 2)] = h;
        Self::new(rho, None, Provenance::Explicit).expect("valid state")
    }

    pub fn maximally_mixed() -> Self {
        Self::new(Matrix4::identity() * c(0.25), None, Provenance::Explicit).expect("valid state")
    }

    /// `p |Psi+><Psi+| + (1 - p) I / 4`.
    pub fn werner(p: f64) -> Result<Self> {
        let rho = Self::bell_psi_plus().rho * c(p) + Matrix4::identity() * c((1.0 - p) / 4.0);
        Self::new(rho, None, Provenance::Explicit)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.rho
    }

    pub fn sites(&self) -> Option<(Site, Site)> {
        self.sites
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn reduced_first(&self) -> Matrix2<Complex64> {
        Matrix2::from_fn(|a, ap| (0..2).map(|b| self.rho[(2 * a + b, 2 * ap + b)]).sum())
    }

    pub fn reduced_second(&self) -> Matrix2<Complex64> {
        Matrix2::from_fn(|b, bp| (0..2).map(|a| self.rho[(2 * a + b, 2 * a + bp)]).sum())
    }
}

fn hermitian_eigenvalues4(m: &Matrix4<Complex64>) -> Vec<f64> {
    let sym = (m + m.adjoint()) * c(0.5);
    sym.symmetric_eigenvalues().iter().copied().collect()
}

fn hermitian_eigenvalues2(m: &Matrix2<Complex64>) -> Vec<f64> {
    let sym = (m + m.adjoint()) * c(0.5);
    sym.symmetric_eigenvalues().iter().copied().collect()
}

/// Von Neumann entropy in bits of a spectrum, clipping tiny negative eigenvalues.
fn entropy_of(eigs: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &e in eigs {
        if e < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("eigenvalue {e:e} below zero")));
        }
        if e > 0.0 {
            s -= e * e.log2();
        }
    }
    Ok(s)
}

pub fn entropy4(m: &Matrix4<Complex64>) -> Result<f64> {
    entropy_of(&hermitian_eigenvalues4(m))
}

pub fn entropy2(m: &Matrix2<Complex64>) -> Result<f64> {
    entropy_of(&hermitian_eigenvalues2(m))
}

/// Pair state of sites `n` (first) and `m` (second) from free-fermion contractions.
pub fn two_qubit_rdm<S: TwoPointSource + ?Sized>(src: &S, n: Site, m: Site) -> Result<TwoQubitState> {
    let k = pair_correlators(src, n, m)?;
    TwoQubitState::from_correlators(k, Some((n, m)), Provenance::FreeFermion)
}

pub fn pair_correlators<S: TwoPointSource + ?Sized>(src: &S, n: Site, m: Site) -> Result<PairCorrelators> {
    let occ = src.pair_occupation(n, m)?;
    Ok(PairCorrelators {
        z_a: magnetization(src, n)?,
        z_b: magnetization(src, m)?,
        xx: xx_correlator(src, n, m)?,
        yy: yy_correlator(src, n, m)?,
        zz: zz_correlator(src, n, m)?,
        up_up: occ.both,
        down_down: occ.neither,
    })
}

/// `max(0, |<sx sx>| - (1/2) sqrt((1 + <sz sz>)^2 - (<sz_n> + <sz_m>)^2))`.
///
/// The coherence `rho_{01,10}` is `(xx + yy)/4 = xx/2` here, and only its modulus
/// enters the concurrence. `xx` can be negative for distant pairs on small rings.
pub fn concurrence_from_correlators(xx: f64, zz: f64, z_n: f64, z_m: f64) -> f64 {
    let big = 1.0 + zz;
    let small = z_n + z_m;
    let radicand = (big * big - small * small).max(0.0);
    (xx.abs() - 0.5 * radicand.sqrt()).max(0.0)
}

/// The same expression with the radicand factored as
/// `(1 + zz + z_n + z_m)(1 + zz - z_n - z_m) = 16 p_upup p_downdown`.
pub fn concurrence_from_populations(xx: f64, up_up: f64, down_down: f64) -> f64 {
    (xx.abs() - 2.0 * (up_up * down_down).max(0.0).sqrt()).max(0.0)
}

/// Closed-form concurrence of a pair. The square root amplifies rounding in the
/// corner populations near zero, so those are taken from the source directly
/// rather than recombined from `zz` and the magnetizations.
pub fn concurrence_closed_form<S: TwoPointSource + ?Sized>(src: &S, n: Site, m: Site) -> Result<f64> {
    let k = pair_correlators(src, n, m)?;
    Ok(concurrence_from_populations(k.xx, k.up_up, k.down_down))
}

/// Wootters concurrence from the spin-flipped state `(sy sy) rho* (sy sy)`.
///
/// The Wootters numbers are the square roots of the eigenvalues of
/// `R = sqrt(rho) rho~ sqrt(rho) = A A^dagger` with `A = sqrt(rho) (sy sy) sqrt(rho)*`,
/// so they are taken as the singular values of `A`. This avoids a second square
/// root that would turn roundoff near zero eigenvalues into `1e-8` errors.
pub fn concurrence_wootters(state: &TwoQubitState) -> f64 {
    let rho = state.rho;
    let p = pauli();
    let yy = p[2].kronecker(&p[2]);
    let sym = (rho + rho.adjoint()) * c(0.5);
    let eig = sym.symmetric_eigen();
    let sqrt_diag = Matrix4::from_diagonal(&eig.eigenvalues.map(|e| c(e.max(0.0).sqrt())));
    let root = eig.eigenvectors * sqrt_diag * eig.eigenvectors.adjoint();
    let a = root * yy * root.conjugate();
    let mut lambdas: Vec<f64> = a.singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

pub fn mutual_information(state: &TwoQubitState) -> Result<f64> {
    Ok(entropy2(&state.reduced_first())? + entropy2(&state.reduced_second())? - entropy4(&state.rho)?)
}

/// Entropy of the first site averaged over the outcomes of a projective
/// measurement of the second site along the Bloch direction `(theta, phi)`.
pub fn conditional_entropy(state: &TwoQubitState, theta: f64, phi: f64) -> Result<f64> {
    let p = pauli();
    let (st, ct) = theta.sin_cos();
    let dir = p[1] * c(st * phi.cos()) + p[2] * c(st * phi.sin()) + p[3] * c(ct);
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        let proj = (p[0] + dir * c(sign)) * c(0.5);
        let post = Matrix2::from_fn(|a, ap| {
            let mut s = c(0.0);
            for b in 0..2 {
                for bp in 0..2 {
                    s += state.rho[(2 * a + b, 2 * ap + bp)] * proj[(bp, b)];
                }
            }
            s
        });
        let prob = post.trace().re;
        if prob > 1e-15 {
            total += prob * entropy2(&(post / c(prob)))?;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOptimum {
    pub classical_correlations: f64,
    pub theta: f64,
    pub conditional_entropy: f64,
}

/// Classical correlations `S(rho_A) - min_theta S(A | measurement on B)`.
///
/// The azimuth is dropped for U(1)-symmetric states; that assumption is checked at
/// the optimum and at `theta = pi/4`.
pub fn optimize_measurement(state: &TwoQubitState) -> Result<MeasurementOptimum> {
    let f = |t: f64| conditional_entropy(state, t, 0.0);
    let step = FRAC_PI_2 / (THETA_GRID - 1) as f64;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..THETA_GRID {
        let v = f(i as f64 * step)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let mut lo = best.0.saturating_sub(1) as f64 * step;
    let mut hi = ((best.0 + 1).min(THETA_GRID - 1)) as f64 * step;
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut steps = 0;
    while hi - lo > GOLDEN_TOL {
        steps += 1;
        if steps > GOLDEN_MAX_STEPS {
            return Err(Error::Optimizer {
                best: f1.min(f2),
                lo,
                hi,
            });
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let (mut theta, mut value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    // Keep the grid point if refinement did not improve on it (minimum at an end).
    if best.1 < value {
        theta = best.0 as f64 * step;
        value = best.1;
    }
    for t in [theta, FRAC_PI_2 / 2.0] {
        let drift = (conditional_entropy(state, t, 1.1)? - conditional_entropy(state, t, 0.0)?).abs();
        if drift > AZIMUTH_TOL {
            return Err(Error::NotXState(drift));
        }
    }
    let s_a = entropy2(&state.reduced_first())?;
    Ok(MeasurementOptimum {
        classical_correlations: s_a - value,
        theta,
        conditional_entropy: value,
    })
}

pub fn classical_correlations(state: &TwoQubitState) -> Result<f64> {
    Ok(optimize_measurement(state)?.classical_correlations)
}

pub fn quantum_discord(state: &TwoQubitState) -> Result<f64> {
    Ok(correlation_measures(state)?.quantum_discord)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMeasures {
    pub concurrence: f64,
    pub mutual_information: f64,
    pub classical_correlations: f64,
    pub quantum_discord: f64,
}

pub fn correlation_measures(state: &TwoQubitState) -> Result<CorrelationMeasures> {
    let mi = mutual_information(state)?;
    let cc = classical_correlations(state)?;
    let qd = mi - cc;
    if qd < -1e-9 {
        return Err(Error::InvalidState(format!("negative discord {qd:e}")));
    }
    Ok(CorrelationMeasures {
        concurrence: concurrence_wootters(state),
        mutual_information: mi,
        classical_correlations: cc,
        quantum_discord: qd,
    })
}
