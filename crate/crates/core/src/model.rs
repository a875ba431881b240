//! Lattice labels and the single-particle hopping matrix.
//!
//! Sites carry half-integer labels `n = -M+1/2, ..., M-1/2` and are stored in arrays
//! at position `p = n + M - 1/2`. Bond `b` joins sites `b - 1/2` and `b + 1/2`, so the
//! defect bond is `b = 0`, between positions `M-1` and `M`, and the wrap bond of a
//! ring joins positions `0` and `2M-1`.
//!
//! After the Jordan-Wigner map (spin up = occupied fermion) the spin Hamiltonian
//!
//! ```text
//! H = -(1/2) sum_b J_b (sx sx + sy sy) - h sum_n sz_n
//! ```
//!
//! becomes `sum_{nm} A_{nm} c+_n c_m + const` with hopping `-J_b` and diagonal `-2h`.
//! The uniform ring therefore has `eps(k) = -2 cos k - 2h`, and `h >= 1` pushes the
//! whole band below zero: the sea fills and every spin points up.

use std::fmt;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Sign multiplying every hopping amplitude in the single-particle matrix.
pub const HOPPING_SIGN: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Ring whose wrap bond ignores the Jordan-Wigner parity string. Exact only as
    /// `M -> infinity`.
    RingNaive,
    /// Ring with the wrap-bond sign fixed self-consistently by the fermion parity.
    /// Reproduces the spin model exactly at every `M`.
    RingParityExact,
    /// Open chain of `2M` sites without any defect.
    OpenSegment,
}

impl Boundary {
    pub fn is_ring(self) -> bool {
        !matches!(self, Boundary::OpenSegment)
    }

    pub fn name(self) -> &'static str {
        match self {
            Boundary::RingNaive => "ring_naive",
            Boundary::RingParityExact => "ring_parity_exact",
            Boundary::OpenSegment => "open_segment",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    half_length: usize,
    defect: f64,
    field: f64,
    boundary: Boundary,
}

impl ModelParams {
    pub fn new(half_length: usize, defect: f64, field: f64, boundary: Boundary) -> Result<Self> {
        if half_length < 2 {
            return Err(Error::HalfLengthTooSmall(half_length));
        }
        if !defect.is_finite() || defect < 0.0 {
            return Err(Error::InvalidDefect(defect));
        }
        if !field.is_finite() {
            return Err(Error::InvalidField(field));
        }
        Ok(Self {
            half_length,
            defect,
            field,
            boundary,
        })
    }

    /// `M`; the lattice has `2M` sites.
    pub fn half_length(&self) -> usize {
        self.half_length
    }

    /// Defect coupling `j`.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    /// Field `h`.
    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn n_sites(&self) -> usize {
        2 * self.half_length
    }

    pub fn with_boundary(&self, boundary: Boundary) -> Self {
        Self { boundary, ..*self }
    }

    pub fn with_defect(&self, defect: f64) -> Result<Self> {
        Self::new(self.half_length, defect, self.field, self.boundary)
    }

    pub fn with_field(&self, field: f64) -> Result<Self> {
        Self::new(self.half_length, self.defect, field, self.boundary)
    }
}

/// Half-integer site label, stored as the odd integer `2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site(i64);

impl Site {
    /// Site with label `twice / 2`; `twice` must be odd.
    pub fn from_twice(twice: i64) -> Result<Self> {
        if twice.rem_euclid(2) != 1 {
            return Err(Error::NotHalfInteger(twice as f64 / 2.0));
        }
        Ok(Self(twice))
    }

    pub fn new(label: f64) -> Result<Self> {
        let twice = 2.0 * label;
        if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > 1e15 {
            return Err(Error::NotHalfInteger(label));
        }
        Self::from_twice(twice as i64)
    }

    /// The two sites joined by bond `b`: `(b - 1/2, b + 1/2)`.
    pub fn bond(b: i64) -> (Site, Site) {
        (Site(2 * b - 1), Site(2 * b + 1))
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Integer distance `|n - m|`.
    pub fn distance(self, other: Site) -> usize {
        ((self.0 - other.0).unsigned_abs() / 2) as usize
    }

    /// Site shifted by an integer number of lattice steps.
    pub fn offset(self, steps: i64) -> Site {
        Site(self.0 + 2 * steps)
    }

    /// Mirror image `-n` under the reflection about the defect bond.
    pub fn mirror(self) -> Site {
        Site(-self.0)
    }

    /// `|n|` as a real number.
    pub fn abs_value(self) -> f64 {
        self.value().abs()
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 < 0 {
            write!(f, "-{}/2", -self.0)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Array position of site `n` on a `2M`-site lattice: `p = n + M - 1/2`.
pub fn site_to_pos(site: Site, half_length: usize) -> Result<usize> {
    let n_sites = 2 * half_length;
    let p = (site.0 + 2 * half_length as i64 - 1) / 2;
    if p < 0 || p as usize >= n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    Ok(p as usize)
}

pub fn pos_to_site(pos: usize, half_length: usize) -> Result<Site> {
    let n_sites = 2 * half_length;
    if pos >= n_sites {
        return Err(Error::PositionOutOfRange { pos, n_sites });
    }
    Ok(Site(2 * pos as i64 - 2 * half_length as i64 + 1))
}

/// Fermion-parity sector of a ring whose wrap bond carries the Jordan-Wigner string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParitySector {
    /// Array positions of the bond whose hopping carries the parity factor.
    pub bond: (usize, usize),
    /// Whether the hopping on that bond has its sign reversed relative to the
    /// bulk. Reversed sign corresponds to an even number of fermions.
    pub flipped: bool,
}

impl ParitySector {
    /// Fermion-number parity (0 even, 1 odd) that a state must have to belong here.
    pub fn required_parity(&self) -> usize {
        if self.flipped {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticleHamiltonian {
    pub matrix: DMatrix<f64>,
    pub sector: Option<ParitySector>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelHamiltonian {
    Single(SingleParticleHamiltonian),
    /// The two wrap-sign sectors of a parity-exact ring, unflipped sector first.
    ParitySectors([SingleParticleHamiltonian; 2]),
}

impl ModelHamiltonian {
    pub fn matrices(&self) -> Vec<&SingleParticleHamiltonian> {
        match self {
            ModelHamiltonian::Single(h) => vec![h],
            ModelHamiltonian::ParitySectors(pair) => pair.iter().collect(),
        }
    }
}

/// Hopping matrix of the ring with its defect, ignoring the parity string.
pub fn ring_matrix(half_length: usize, defect: f64, field: f64) -> DMatrix<f64> {
    let n = 2 * half_length;
    let mut a = chain_matrix(n, field);
    let d = half_length - 1;
    a[(d, d + 1)] = HOPPING_SIGN * defect;
    a[(d + 1, d)] = HOPPING_SIGN * defect;
    a[(0, n - 1)] += HOPPING_SIGN;
    a[(n - 1, 0)] += HOPPING_SIGN;
    a
}

/// Uniform open chain of `length` sites with hopping `-1` and diagonal `-2h`.
pub fn chain_matrix(length: usize, field: f64) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(length, length);
    for p in 0..length {
        a[(p, p)] = -2.0 * field;
        if p + 1 < length {
            a[(p, p + 1)] = HOPPING_SIGN;
            a[(p + 1, p)] = HOPPING_SIGN;
        }
    }
    a
}

/// Both parity sectors built from `base` by reversing, or not, the sign of the
/// hopping on `bond`.
pub fn parity_sectors(base: &DMatrix<f64>, bond: (usize, usize)) -> [SingleParticleHamiltonian; 2] {
    let plain = SingleParticleHamiltonian {
        matrix: base.clone(),
        sector: Some(ParitySector {
            bond,
            flipped: false,
        }),
    };
    let mut flipped = base.clone();
    flipped[(bond.0, bond.1)] = -flipped[(bond.0, bond.1)];
    flipped[(bond.1, bond.0)] = -flipped[(bond.1, bond.0)];
    let flipped = SingleParticleHamiltonian {
        matrix: flipped,
        sector: Some(ParitySector {
            bond,
            flipped: true,
        }),
    };
    [plain, flipped]
}

pub fn build_hamiltonian(params: &ModelParams) -> ModelHamiltonian {
    let m = params.half_length();
    match params.boundary() {
        Boundary::OpenSegment => ModelHamiltonian::Single(SingleParticleHamiltonian {
            matrix: chain_matrix(2 * m, params.field()),
            sector: None,
        }),
        Boundary::RingNaive => ModelHamiltonian::Single(SingleParticleHamiltonian {
            matrix: ring_matrix(m, params.defect(), params.field()),
            sector: None,
        }),
        Boundary::RingParityExact => {
            let base = ring_matrix(m, params.defect(), params.field());
            ModelHamiltonian::ParitySectors(parity_sectors(&base, (0, 2 * m - 1)))
        }
    }
}
