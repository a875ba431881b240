//! Single-particle spectra, Dirac-sea filling and the localized impurity modes.

use nalgebra::{DMatrix, DVector};

use crate::linalg::symmetric_eigen;
use crate::model::{
    build_hamiltonian, parity_sectors, ModelHamiltonian, ModelParams, ParitySector,
    SingleParticleHamiltonian,
};
use crate::Result;

/// Eigenvalues with `|lambda| <= ZERO_MODE_TOL` sit at the Fermi level: they are left
/// empty and raise the zero-mode flag.
pub const ZERO_MODE_TOL: f64 = 1e-9;

/// Minimum distance outside the band `[-2h-2, -2h+2]` for an eigenvalue to count as
/// a bound state.
pub const BAND_TOL: f64 = 1e-6;

/// Many-body energies closer than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors in columns, indexed by array position.
    pub eigenvectors: DMatrix<f64>,
    /// Field the matrix was built with; fixes the band edges.
    pub field: f64,
    pub sector: Option<ParitySector>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn mode(&self, i: usize) -> DVector<f64> {
        self.eigenvectors.column(i).into_owned()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Occupation {
    pub occupied: Vec<bool>,
    pub count: usize,
    pub zero_mode_flag: bool,
}

impl Occupation {
    pub fn occupied_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.occupied
            .iter()
            .enumerate()
            .filter_map(|(i, &o)| o.then_some(i))
    }

    pub fn parity(&self) -> usize {
        self.count % 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandSide {
    Above,
    Below,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    pub energy: f64,
    pub side: BandSide,
    /// Index into the spectrum.
    pub index: usize,
}

pub fn diagonalize(h: &SingleParticleHamiltonian, field: f64) -> Result<Spectrum> {
    let eig = symmetric_eigen(&h.matrix)?;
    Ok(Spectrum {
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
        field,
        sector: h.sector,
    })
}

pub fn diagonalize_matrix(a: &DMatrix<f64>, field: f64) -> Result<Spectrum> {
    diagonalize(
        &SingleParticleHamiltonian {
            matrix: a.clone(),
            sector: None,
        },
        field,
    )
}

/// Dirac sea: every mode strictly below `-ZERO_MODE_TOL` is filled.
pub fn occupation(spec: &Spectrum) -> Occupation {
    let occupied: Vec<bool> = spec.eigenvalues.iter().map(|&e| e < -ZERO_MODE_TOL).collect();
    let count = occupied.iter().filter(|&&o| o).count();
    let zero_mode_flag = spec.eigenvalues.iter().any(|e| e.abs() <= ZERO_MODE_TOL);
    Occupation {
        occupied,
        count,
        zero_mode_flag,
    }
}

pub fn bound_state_energies(spec: &Spectrum) -> Vec<BoundState> {
    let lo = -2.0 * spec.field - 2.0;
    let hi = -2.0 * spec.field + 2.0;
    spec.eigenvalues
        .iter()
        .enumerate()
        .filter_map(|(index, &energy)| {
            if energy < lo - BAND_TOL {
                Some(BoundState {
                    energy,
                    side: BandSide::Below,
                    index,
                })
            } else if energy > hi + BAND_TOL {
                Some(BoundState {
                    energy,
                    side: BandSide::Above,
                    index,
                })
            } else {
                None
            }
        })
        .collect()
}

/// A filled Slater determinant together with the spectrum it is built from.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub spectrum: Spectrum,
    pub occupation: Occupation,
    /// Many-body energy `sum of filled eigenvalues` (constants dropped).
    pub energy: f64,
    /// Set when another state of the same model lies within `DEGENERACY_TOL`.
    pub degenerate: bool,
}

impl GroundState {
    /// Columns of the filled modes.
    pub fn occupied_modes(&self) -> DMatrix<f64> {
        let idx: Vec<usize> = self.occupation.occupied_indices().collect();
        self.spectrum.eigenvectors.select_columns(idx.iter())
    }

    /// Columns of the empty modes.
    pub fn empty_modes(&self) -> DMatrix<f64> {
        let idx: Vec<usize> = (0..self.spectrum.len())
            .filter(|&i| !self.occupation.occupied[i])
            .collect();
        self.spectrum.eigenvectors.select_columns(idx.iter())
    }

    pub fn zero_mode_flag(&self) -> bool {
        self.occupation.zero_mode_flag
    }
}

fn sea(spectrum: Spectrum) -> GroundState {
    let occupation = occupation(&spectrum);
    let energy = occupied_energy(&spectrum, &occupation);
    GroundState {
        spectrum,
        occupation,
        energy,
        degenerate: false,
    }
}

fn occupied_energy(spec: &Spectrum, occ: &Occupation) -> f64 {
    occ.occupied_indices().map(|i| spec.eigenvalues[i]).sum()
}

/// Ground state of the model in the boundary mode carried by `params`.
pub fn ground_state(params: &ModelParams) -> Result<GroundState> {
    match build_hamiltonian(params) {
        ModelHamiltonian::Single(h) => Ok(sea(diagonalize(&h, params.field())?)),
        ModelHamiltonian::ParitySectors([a, b]) => {
            parity_exact_from_sectors(diagonalize(&a, params.field())?, diagonalize(&b, params.field())?)
        }
    }
}

/// Exact ground state of a ring of `n` sites whose Jordan-Wigner string starts at
/// position `first`, so that the parity factor sits on the bond `(first-1, first)`
/// (the wrap bond when `first = 0`).
///
/// Flipping the sign of one ring bond is gauge-equivalent to flipping any other:
/// negating the amplitudes on positions `first..n` moves the flip from the wrap bond
/// to `(first-1, first)`. The sectors are therefore diagonalized with the flip on
/// the wrap bond, where the matrix keeps its reflection symmetry, and the gauge is
/// applied to the eigenvectors afterwards.
pub fn parity_exact_ground_state(base: &DMatrix<f64>, first: usize, field: f64) -> Result<GroundState> {
    let n = base.nrows();
    if first >= n {
        return Err(crate::Error::PositionOutOfRange { pos: first, n_sites: n });
    }
    let [a, b] = parity_sectors(base, (0, n - 1));
    let mut best = parity_exact_from_sectors(diagonalize(&a, field)?, diagonalize(&b, field)?)?;
    if first > 0 {
        let sector = best.spectrum.sector.as_mut().expect("parity sector metadata");
        sector.bond = (first - 1, first);
        if sector.flipped {
            for mut col in best.spectrum.eigenvectors.column_iter_mut() {
                for p in first..n {
                    col[p] = -col[p];
                }
            }
        }
    }
    Ok(best)
}

/// Lowest Slater determinant whose particle-number parity matches its own sector.
fn sector_candidate(spectrum: Spectrum) -> GroundState {
    let required = spectrum
        .sector
        .expect("parity sector metadata")
        .required_parity();
    let base = sea(spectrum);
    if base.occupation.parity() == required {
        return base;
    }
    let filled = base.occupation.count;
    let n = base.spectrum.len();
    let zero_flag = base.occupation.zero_mode_flag;
    let mut options: Vec<(f64, Vec<bool>)> = Vec::new();
    if filled < n {
        let mut mask = base.occupation.occupied.clone();
        mask[filled] = true;
        options.push((base.energy + base.spectrum.eigenvalues[filled], mask));
    }
    if filled > 0 {
        let mut mask = base.occupation.occupied.clone();
        mask[filled - 1] = false;
        options.push((base.energy - base.spectrum.eigenvalues[filled - 1], mask));
    }
    options.sort_by(|a, b| a.0.total_cmp(&b.0));
    let degenerate = options.len() == 2 && (options[1].0 - options[0].0).abs() < DEGENERACY_TOL;
    let (energy, occupied) = options.swap_remove(0);
    let count = occupied.iter().filter(|&&o| o).count();
    GroundState {
        spectrum: base.spectrum,
        occupation: Occupation {
            occupied,
            count,
            zero_mode_flag: zero_flag,
        },
        energy,
        degenerate,
    }
}

fn parity_exact_from_sectors(a: Spectrum, b: Spectrum) -> Result<GroundState> {
    let ca = sector_candidate(a);
    let cb = sector_candidate(b);
    let tie = (ca.energy - cb.energy).abs() < DEGENERACY_TOL;
    let mut best = if cb.energy < ca.energy { cb } else { ca };
    best.degenerate |= tie;
    // A mode at the Fermi level inside a sector changes the many-body energy by less
    // than ZERO_MODE_TOL when toggled, so the sea there is degenerate too.
    best.degenerate |= best.occupation.zero_mode_flag;
    Ok(best)
}
