//! Brute-force exact diagonalization of the spin model, for validation.
//!
//! Basis states are bit strings over array positions; bit `p` set means spin up at
//! position `p`. The Hamiltonian
//!
//! ```text
//! H = -sum_bonds J_b (s+_p s-_q + s-_p s+_q) - h sum_p sz_p
//! ```
//!
//! conserves the number of up spins, so it is diagonalized block by block with
//! nalgebra's symmetric eigensolver, independently of [`crate::linalg`]. No
//! fermions are involved except in [`fock_ground_state`], which diagonalizes a
//! quadratic fermion Hamiltonian in Fock space with explicit anticommutation signs
//! (needed for the naive ring, which is not a spin model).

use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64;

use crate::fid::segment_position;
use crate::model::{ring_matrix, site_to_pos, Boundary, ModelParams, Site};
use crate::qinfo::{Provenance, TwoQubitState};
use crate::spectrum::DEGENERACY_TOL;
use crate::{Error, Result};

pub const MAX_SPINS: usize = 12;

/// Energy penalty keeping the impurity sites empty in the embedded segment state.
const EMPTY_PENALTY: f64 = 1e3;

#[derive(Debug, Clone)]
pub struct DenseGroundState {
    /// Real amplitudes over the `2^N` basis states.
    pub amplitudes: DVector<f64>,
    pub energy: f64,
    /// Gap to the next eigenvalue across all sectors.
    pub gap: f64,
    pub degenerate: bool,
    pub n_sites: usize,
}

impl DenseGroundState {
    fn require_nondegenerate(&self) -> Result<()> {
        if self.degenerate {
            Err(Error::DegenerateGroundState(self.gap))
        } else {
            Ok(())
        }
    }

    fn pos(&self, s: Site) -> Result<usize> {
        site_to_pos(s, self.n_sites / 2)
    }
}

/// `(p, q, J)` for every bond of the physical spin lattice.
pub fn spin_bonds(params: &ModelParams) -> Vec<(usize, usize, f64)> {
    let n = params.n_sites();
    let m = params.half_length();
    let mut bonds = Vec::new();
    for p in 0..n - 1 {
        let j = if params.boundary().is_ring() && p == m - 1 {
            params.defect()
        } else {
            1.0
        };
        bonds.push((p, p + 1, j));
    }
    if params.boundary().is_ring() {
        bonds.push((0, n - 1, 1.0));
    }
    bonds
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_SPINS {
        return Err(Error::TooManySpins {
            got: n,
            max: MAX_SPINS,
        });
    }
    Ok(())
}

fn sector_states(n: usize, ups: u32) -> Vec<usize> {
    (0..1usize << n).filter(|s| s.count_ones() == ups).collect()
}

/// Dense spin Hamiltonian on the full `2^N` space.
pub fn dense_spin_hamiltonian(n: usize, bonds: &[(usize, usize, f64)], field: f64) -> Result<DMatrix<f64>> {
    check_size(n)?;
    let dim = 1usize << n;
    let mut h = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        h[(s, s)] = spin_diagonal(s, n, field);
        for &(p, q, j) in bonds {
            if ((s >> p) & 1) != ((s >> q) & 1) {
                let t = s ^ (1 << p) ^ (1 << q);
                h[(t, s)] -= j;
            }
        }
    }
    Ok(h)
}

fn spin_diagonal(s: usize, n: usize, field: f64) -> f64 {
    let ups = s.count_ones() as f64;
    -field * (2.0 * ups - n as f64)
}

/// Diagonalize every block `H_sector`, returning the lowest state and gap.
fn lowest_over_sectors<F>(n: usize, mut block: F) -> Result<DenseGroundState>
where
    F: FnMut(&[usize]) -> DMatrix<f64>,
{
    let dim = 1usize << n;
    let mut all: Vec<f64> = Vec::with_capacity(dim);
    let mut best: Option<(f64, DVector<f64>)> = None;
    for ups in 0..=n as u32 {
        let states = sector_states(n, ups);
        let hb = block(&states);
        let eig = nalgebra::SymmetricEigen::new(hb);
        let (imin, emin) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |b, (i, &e)| if e < b.1 { (i, e) } else { b });
        all.extend(eig.eigenvalues.iter());
        if best.as_ref().map_or(true, |b| emin < b.0) {
            let mut v = DVector::zeros(dim);
            for (k, &s) in states.iter().enumerate() {
                v[s] = eig.eigenvectors[(k, imin)];
            }
            best = Some((emin, v));
        }
    }
    all.sort_by(f64::total_cmp);
    let (energy, amplitudes) = best.expect("at least one sector");
    let gap = if all.len() > 1 { all[1] - all[0] } else { f64::INFINITY };
    Ok(DenseGroundState {
        amplitudes,
        energy,
        gap,
        degenerate: gap < DEGENERACY_TOL,
        n_sites: n,
    })
}

pub fn ed_spin_ground_state(n: usize, bonds: &[(usize, usize, f64)], field: f64) -> Result<DenseGroundState> {
    check_size(n)?;
    lowest_over_sectors(n, |states| {
        let d = states.len();
        let mut hb = DMatrix::zeros(d, d);
        for (k, &s) in states.iter().enumerate() {
            hb[(k, k)] = spin_diagonal(s, n, field);
            for &(p, q, j) in bonds {
                if ((s >> p) & 1) != ((s >> q) & 1) {
                    let t = s ^ (1 << p) ^ (1 << q);
                    let l = states.binary_search(&t).expect("same sector");
                    hb[(l, k)] -= j;
                }
            }
        }
        hb
    })
}

/// Spin-model ground state. Both ring boundary modes describe the same spin ring.
pub fn ed_ground_state(params: &ModelParams) -> Result<DenseGroundState> {
    ed_spin_ground_state(params.n_sites(), &spin_bonds(params), params.field())
}

/// Sign `(-1)^(occupied positions strictly between p and q)`.
fn string_sign(s: usize, p: usize, q: usize) -> f64 {
    let (lo, hi) = if p < q { (p, q) } else { (q, p) };
    if hi <= lo + 1 {
        return 1.0;
    }
    let mask = ((1usize << hi) - 1) & !((1usize << (lo + 1)) - 1);
    if (s & mask).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `c_p |s>` as `(sign, state)`, or `None` if position `p` is empty.
fn annihilate(s: usize, p: usize) -> Option<(f64, usize)> {
    if (s >> p) & 1 == 0 {
        return None;
    }
    let below = (s & ((1usize << p) - 1)).count_ones();
    let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
    Some((sign, s ^ (1 << p)))
}

/// Ground state of `sum A_pq c+_p c_q` in Fock space, positions ordered `0..N`.
pub fn fock_ground_state(a: &DMatrix<f64>) -> Result<DenseGroundState> {
    let n = a.nrows();
    check_size(n)?;
    lowest_over_sectors(n, |states| {
        let d = states.len();
        let mut hb = DMatrix::zeros(d, d);
        for (k, &s) in states.iter().enumerate() {
            for p in 0..n {
                if (s >> p) & 1 == 1 {
                    hb[(k, k)] += a[(p, p)];
                }
            }
            for p in 0..n {
                for q in 0..n {
                    if p == q || a[(p, q)] == 0.0 {
                        continue;
                    }
                    if (s >> q) & 1 == 1 && (s >> p) & 1 == 0 {
                        let t = s ^ (1 << q) ^ (1 << p);
                        let l = states.binary_search(&t).expect("same sector");
                        hb[(l, k)] += a[(p, q)] * string_sign(s, p, q);
                    }
                }
            }
        }
        hb
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Apply a single Pauli at position `p` to basis state `s`.
fn apply_pauli(op: Pauli, p: usize, s: usize) -> (Complex64, usize) {
    let up = (s >> p) & 1 == 1;
    match op {
        Pauli::X => (Complex64::new(1.0, 0.0), s ^ (1 << p)),
        // sy |up> = i |down>, sy |down> = -i |up>.
        Pauli::Y => (
            if up {
                Complex64::new(0.0, 1.0)
            } else {
                Complex64::new(0.0, -1.0)
            },
            s ^ (1 << p),
        ),
        Pauli::Z => (Complex64::new(if up { 1.0 } else { -1.0 }, 0.0), s),
    }
}

/// `<psi| prod_k sigma^{op_k}_{site_k} |psi>`.
pub fn ed_correlator(state: &DenseGroundState, ops: &[(Site, Pauli)]) -> Result<f64> {
    state.require_nondegenerate()?;
    let positions = ops
        .iter()
        .map(|&(s, op)| Ok((state.pos(s)?, op)))
        .collect::<Result<Vec<_>>>()?;
    let psi = &state.amplitudes;
    let mut total = Complex64::new(0.0, 0.0);
    for s in 0..psi.len() {
        if psi[s] == 0.0 {
            continue;
        }
        let mut amp = Complex64::new(psi[s], 0.0);
        let mut t = s;
        for &(p, op) in positions.iter().rev() {
            let (f, next) = apply_pauli(op, p, t);
            amp *= f;
            t = next;
        }
        total += amp * psi[t];
    }
    Ok(total.re)
}

/// `<c+_a c_b>` of a spin state, with `c+_p c_q = s+_p prod_{p<l<q} (-sz_l) s-_q`
/// for `p < q` in array order.
pub fn ed_fermion_two_point(state: &DenseGroundState, a: Site, b: Site) -> Result<f64> {
    state.require_nondegenerate()?;
    let (p, q) = (state.pos(a)?, state.pos(b)?);
    let psi = &state.amplitudes;
    let mut total = 0.0;
    for s in 0..psi.len() {
        if psi[s] == 0.0 {
            continue;
        }
        if p == q {
            if (s >> p) & 1 == 1 {
                total += psi[s] * psi[s];
            }
            continue;
        }
        // Lower the spin at q, raise it at p.
        if (s >> q) & 1 == 1 && (s >> p) & 1 == 0 {
            let t = s ^ (1 << q) ^ (1 << p);
            total += psi[t] * psi[s] * string_sign(s, p, q);
        }
    }
    Ok(total)
}

/// Two-site reduced state by explicit partial trace, basis `2a + b`, `0` = up.
pub fn ed_rdm(state: &DenseGroundState, a: Site, b: Site) -> Result<TwoQubitState> {
    state.require_nondegenerate()?;
    let (pa, pb) = (state.pos(a)?, state.pos(b)?);
    if pa == pb {
        return Err(Error::CoincidentSites(a));
    }
    let psi = &state.amplitudes;
    let qubit = |s: usize, p: usize| 1 - ((s >> p) & 1);
    let mut rho = Matrix4::<Complex64>::zeros();
    let clear = !((1usize << pa) | (1usize << pb));
    for s in 0..psi.len() {
        if psi[s] == 0.0 {
            continue;
        }
        let row = 2 * qubit(s, pa) + qubit(s, pb);
        let rest = s & clear;
        for (xa, xb) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
            // Basis state agreeing with s away from the pair, with qubits (xa, xb).
            let t = rest | ((1 - xa) << pa) | ((1 - xb) << pb);
            let col = 2 * xa + xb;
            rho[(row, col)] += Complex64::new(psi[s] * psi[t], 0.0);
        }
    }
    TwoQubitState::new(rho, Some((a, b)), Provenance::ExactDiagonalization)
}

/// Ring-cut fidelity by brute force.
///
/// Parity-exact rings are handled as spin models: the ring state is reduced to the
/// segment by an explicit partial trace over the impurity spins and `<S|rho|S>` is
/// evaluated against the spin ground state of the open segment. The naive ring is
/// not a spin model, so it is handled in Fock space with the four fermionic terms
/// evaluated by applying annihilators with their signs.
pub fn ed_fidelity(params: &ModelParams) -> Result<f64> {
    match params.boundary() {
        Boundary::RingParityExact => spin_fidelity(params),
        Boundary::RingNaive => fock_fidelity(params),
        Boundary::OpenSegment => Err(Error::NotARing("open_segment")),
    }
}

fn spin_fidelity(params: &ModelParams) -> Result<f64> {
    let n = params.n_sites();
    let m = params.half_length();
    let ring = ed_ground_state(params)?;
    ring.require_nondegenerate()?;
    let len = n - 2;
    let seg_bonds: Vec<(usize, usize, f64)> = (0..len - 1).map(|i| (i, i + 1, 1.0)).collect();
    let segment = ed_spin_ground_state(len, &seg_bonds, params.field())?;
    segment.require_nondegenerate()?;

    let embed = |r: usize| -> usize {
        (0..len)
            .filter(|&i| (r >> i) & 1 == 1)
            .map(|i| 1usize << segment_position(i, m))
            .sum()
    };
    let dim = 1usize << len;
    let full: Vec<usize> = (0..dim).map(embed).collect();
    let imp = [0, 1usize << (m - 1), 1usize << m, (1usize << (m - 1)) | (1usize << m)];
    let mut rho = DMatrix::<f64>::zeros(dim, dim);
    for r in 0..dim {
        for rp in 0..dim {
            rho[(r, rp)] = imp
                .iter()
                .map(|&i| ring.amplitudes[full[r] | i] * ring.amplitudes[full[rp] | i])
                .sum();
        }
    }
    let sigma = &segment.amplitudes;
    Ok((sigma.transpose() * rho * sigma)[(0, 0)])
}

fn fock_fidelity(params: &ModelParams) -> Result<f64> {
    let n = params.n_sites();
    let m = params.half_length();
    let h = params.field();
    let omega = fock_ground_state(&ring_matrix(m, params.defect(), h))?;
    omega.require_nondegenerate()?;

    let mut seg = DMatrix::zeros(n, n);
    for i in 0..n - 2 {
        let p = segment_position(i, m);
        seg[(p, p)] = -2.0 * h;
        if i + 1 < n - 2 {
            let q = segment_position(i + 1, m);
            seg[(p, q)] = -1.0;
            seg[(q, p)] = -1.0;
        }
    }
    seg[(m - 1, m - 1)] = EMPTY_PENALTY;
    seg[(m, m)] = EMPTY_PENALTY;
    let sigma = fock_ground_state(&seg)?;
    sigma.require_nondegenerate()?;

    let apply = |v: &DVector<f64>, p: usize| -> DVector<f64> {
        let mut out = DVector::zeros(v.len());
        for s in 0..v.len() {
            if let Some((sign, t)) = annihilate(s, p) {
                out[t] += sign * v[s];
            }
        }
        out
    };
    let w = &omega.amplitudes;
    let w_m = apply(w, m - 1);
    let w_p = apply(w, m);
    let w_mp = apply(&apply(w, m), m - 1);
    let s = &sigma.amplitudes;
    Ok([w, &w_m, &w_p, &w_mp].iter().map(|v| s.dot(v).powi(2)).sum())
}
