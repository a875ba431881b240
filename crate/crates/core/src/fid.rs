//! Fidelity between the ring ground state with the two impurity spins traced out
//! and the ground state of the open segment left behind.
//!
//! Write `|Sigma~>` for the segment ground state placed in the ring's Fock space
//! with the impurity sites empty. Tracing out the impurity sites gives
//!
//! ```text
//! F = |<S~|W>|^2 + |<S~|c_{-1/2}|W>|^2 + |<S~|c_{+1/2}|W>|^2 + |<S~|c_{-1/2} c_{+1/2}|W>|^2
//! ```
//!
//! with `|W>` the ring ground state. Each term is the overlap of two Slater
//! determinants: `<S~| c_a` is the determinant of `|S~>` with the unit mode at `a`
//! appended, so every term is `|det(V^T U)|^2` for suitable occupied-mode sets, and
//! vanishes unless both sets hold the same number of fermions. When more than half
//! the modes are filled the overlap is taken between the empty-mode complements,
//! which has the same magnitude and a smaller determinant.
//!
//! The segment has `2M - 2` sites, ordered from `+3/2` up to `M - 1/2`, across the
//! wrap bond, and from `-M + 1/2` up to `-3/2`.

use nalgebra::DMatrix;

use crate::linalg::determinant;
use crate::model::{chain_matrix, ring_matrix, Boundary, ModelParams};
use crate::spectrum::{diagonalize_matrix, ground_state, occupation, parity_exact_ground_state, GroundState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeLabel {
    Ring,
    Segment,
    /// Segment with the listed impurity sites additionally filled.
    SegmentPlus(&'static str),
}

/// Occupied modes (columns of `modes`) of a Slater determinant on `N` sites,
/// together with an orthonormal basis of the empty modes.
#[derive(Debug, Clone)]
pub struct ModeMatrix {
    modes: DMatrix<f64>,
    complement: DMatrix<f64>,
    pub label: ModeLabel,
}

impl ModeMatrix {
    pub fn new(modes: DMatrix<f64>, complement: DMatrix<f64>, label: ModeLabel) -> Result<Self> {
        if modes.nrows() != complement.nrows() {
            return Err(Error::DimensionMismatch(modes.nrows(), complement.nrows()));
        }
        if modes.ncols() + complement.ncols() != modes.nrows() {
            return Err(Error::DimensionMismatch(
                modes.ncols() + complement.ncols(),
                modes.nrows(),
            ));
        }
        Ok(Self {
            modes,
            complement,
            label,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.modes.nrows()
    }

    /// Number of filled modes `K`.
    pub fn count(&self) -> usize {
        self.modes.ncols()
    }

    /// `N x K`, one occupied mode per column.
    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    pub fn complement(&self) -> &DMatrix<f64> {
        &self.complement
    }

    /// Move the unit vectors at `positions` from the empty set to the filled set.
    /// The empty set must contain them as columns.
    fn fill_units(&self, positions: &[usize], label: ModeLabel) -> Result<Self> {
        let n = self.n_sites();
        let mut keep = Vec::new();
        let mut found = vec![false; positions.len()];
        'col: for c in 0..self.complement.ncols() {
            let col = self.complement.column(c);
            for (i, &p) in positions.iter().enumerate() {
                if col[p] == 1.0 && col.iter().filter(|&&x| x != 0.0).count() == 1 {
                    found[i] = true;
                    continue 'col;
                }
            }
            keep.push(c);
        }
        if found.iter().any(|f| !f) {
            return Err(Error::DimensionMismatch(positions.len(), found.iter().filter(|&&f| f).count()));
        }
        let mut modes = DMatrix::zeros(n, self.count() + positions.len());
        modes.columns_mut(0, self.count()).copy_from(&self.modes);
        for (i, &p) in positions.iter().enumerate() {
            modes[(p, self.count() + i)] = 1.0;
        }
        let complement = self.complement.select_columns(keep.iter());
        Self::new(modes, complement, label)
    }
}

/// `det(V^T U)` for two occupied-mode sets; zero when the fermion numbers differ.
pub fn dirac_sea_overlap(v: &ModeMatrix, u: &ModeMatrix) -> Result<f64> {
    if v.n_sites() != u.n_sites() {
        return Err(Error::DimensionMismatch(v.n_sites(), u.n_sites()));
    }
    if v.count() != u.count() {
        return Ok(0.0);
    }
    Ok(determinant(&v.modes.tr_mul(&u.modes)))
}

/// `|det(V^T U)|`, evaluated through the empty-mode complements when they are smaller.
pub fn overlap_magnitude(v: &ModeMatrix, u: &ModeMatrix) -> Result<f64> {
    if v.n_sites() != u.n_sites() {
        return Err(Error::DimensionMismatch(v.n_sites(), u.n_sites()));
    }
    if v.count() != u.count() {
        return Ok(0.0);
    }
    if 2 * v.count() > v.n_sites() {
        Ok(determinant(&v.complement.tr_mul(&u.complement)).abs())
    } else {
        Ok(determinant(&v.modes.tr_mul(&u.modes)).abs())
    }
}

/// The open segment's ground state, embedded in the ring's `2M` sites.
#[derive(Debug, Clone)]
pub struct SegmentModes {
    pub half_length: usize,
    pub field: f64,
    /// Single-particle energies, ascending.
    pub energies: Vec<f64>,
    pub modes: ModeMatrix,
    pub zero_mode_flag: bool,
}

/// Array position of segment index `i`.
pub fn segment_position(i: usize, half_length: usize) -> usize {
    (half_length + 1 + i) % (2 * half_length)
}

pub fn segment_modes(half_length: usize, field: f64) -> Result<SegmentModes> {
    if half_length < 2 {
        return Err(Error::HalfLengthTooSmall(half_length));
    }
    let n = 2 * half_length;
    let len = n - 2;
    let spec = diagonalize_matrix(&chain_matrix(len, field), field)?;
    let occ = occupation(&spec);
    let embed = |cols: &[usize], extra: &[usize]| {
        let mut out = DMatrix::zeros(n, cols.len() + extra.len());
        for (k, &c) in cols.iter().enumerate() {
            for i in 0..len {
                out[(segment_position(i, half_length), k)] = spec.eigenvectors[(i, c)];
            }
        }
        for (k, &p) in extra.iter().enumerate() {
            out[(p, cols.len() + k)] = 1.0;
        }
        out
    };
    let filled: Vec<usize> = occ.occupied_indices().collect();
    let empty: Vec<usize> = (0..len).filter(|&i| !occ.occupied[i]).collect();
    let impurity = [half_length - 1, half_length];
    let modes = ModeMatrix::new(embed(&filled, &[]), embed(&empty, &impurity), ModeLabel::Segment)?;
    Ok(SegmentModes {
        half_length,
        field,
        energies: spec.eigenvalues,
        modes,
        zero_mode_flag: occ.zero_mode_flag,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    /// `|<S~|W>|^2`
    pub term_00: f64,
    /// `|<S~|c_{-1/2}|W>|^2`
    pub term_m: f64,
    /// `|<S~|c_{+1/2}|W>|^2`
    pub term_p: f64,
    /// `|<S~|c_{-1/2} c_{+1/2}|W>|^2`
    pub term_mp: f64,
    pub total: f64,
    pub ring_count: usize,
    pub segment_count: usize,
    pub zero_mode_flag: bool,
    /// The ring ground state was degenerate; the fidelity then depends on which
    /// state was picked.
    pub degenerate: bool,
}

fn ring_state(params: &ModelParams) -> Result<GroundState> {
    let m = params.half_length();
    match params.boundary() {
        Boundary::RingNaive => ground_state(params),
        // Fermion order starts at -1/2, so the parity factor sits on the bond
        // (-3/2, -1/2) inside the segment and both impurity sites lead the order.
        Boundary::RingParityExact => parity_exact_ground_state(
            &ring_matrix(m, params.defect(), params.field()),
            m - 1,
            params.field(),
        ),
        Boundary::OpenSegment => Err(Error::NotARing("open_segment")),
    }
}

pub fn ring_cut_fidelity(params: &ModelParams) -> Result<FidelityReport> {
    let segment = segment_modes(params.half_length(), params.field())?;
    ring_cut_fidelity_with(params, &segment)
}

/// Same as [`ring_cut_fidelity`] with a precomputed segment state, which depends
/// only on `M` and `h`.
pub fn ring_cut_fidelity_with(params: &ModelParams, segment: &SegmentModes) -> Result<FidelityReport> {
    if segment.half_length != params.half_length() || segment.field != params.field() {
        return Err(Error::DimensionMismatch(segment.half_length, params.half_length()));
    }
    let g = ring_state(params)?;
    let ring = ModeMatrix::new(g.occupied_modes(), g.empty_modes(), ModeLabel::Ring)?;
    let m = params.half_length();
    let (minus, plus) = (m - 1, m);
    let s = &segment.modes;
    let s_m = s.fill_units(&[minus], ModeLabel::SegmentPlus("-1/2"))?;
    let s_p = s.fill_units(&[plus], ModeLabel::SegmentPlus("+1/2"))?;
    let s_mp = s.fill_units(&[minus, plus], ModeLabel::SegmentPlus("-1/2,+1/2"))?;
    let term = |u: &ModeMatrix| -> Result<f64> { Ok(overlap_magnitude(&ring, u)?.powi(2)) };
    let term_00 = term(s)?;
    let term_m = term(&s_m)?;
    let term_p = term(&s_p)?;
    let term_mp = term(&s_mp)?;
    Ok(FidelityReport {
        term_00,
        term_m,
        term_p,
        term_mp,
        total: term_00 + term_m + term_p + term_mp,
        ring_count: ring.count(),
        segment_count: s.count(),
        zero_mode_flag: g.zero_mode_flag() || segment.zero_mode_flag,
        degenerate: g.degenerate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityPoint {
    pub half_length: usize,
    pub field: f64,
    pub defect: f64,
    pub report: Result<FidelityReport>,
}

/// Fidelity over the grid `M x h x j`, in that nesting order.
pub fn fidelity_sweep(
    half_lengths: &[usize],
    fields: &[f64],
    defects: &[f64],
    boundary: Boundary,
) -> Vec<FidelityPoint> {
    let mut out = Vec::new();
    for &m in half_lengths {
        for &h in fields {
            let segment = segment_modes(m, h);
            for &j in defects {
                let report = match &segment {
                    Ok(seg) => ModelParams::new(m, j, h, boundary)
                        .and_then(|p| ring_cut_fidelity_with(&p, seg)),
                    Err(e) => Err(e.clone()),
                };
                out.push(FidelityPoint {
                    half_length: m,
                    field: h,
                    defect: j,
                    report,
                });
            }
        }
    }
    out
}
