use thiserror::Error;

use crate::model::Site;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("half-length M must be at least 2, got {0}")]
    HalfLengthTooSmall(usize),

    #[error("defect strength must be finite and nonnegative, got {0}")]
    InvalidDefect(f64),

    #[error("field must be finite, got {0}")]
    InvalidField(f64),

    #[error("{0} is not a half-odd-integer site label")]
    NotHalfInteger(f64),

    #[error("site {site} lies outside a lattice of {n_sites} sites")]
    SiteOutOfRange { site: Site, n_sites: usize },

    #[error("array position {pos} lies outside 0..{n_sites}")]
    PositionOutOfRange { pos: usize, n_sites: usize },

    #[error("matrix is not square and symmetric")]
    NotSymmetric,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("eigensolver did not converge for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("operation needs a ring boundary, got {0}")]
    NotARing(&'static str),

    #[error("two distinct sites are required, got {0} twice")]
    CoincidentSites(Site),

    #[error("energy {z} sits on a band edge (|x^2 - 1| = {distance:e})")]
    BandEdge { z: f64, distance: f64 },

    #[error("T-matrix is singular at z = {0} (pole of the full Green function)")]
    TMatrixPole(f64),

    #[error("wavevector {0} has sin|k| = 0 or lies outside [-pi, pi]")]
    BandEdgeWavevector(f64),

    #[error("out-of-band poles are searched within {max:e} of the band edges; j = {j:e} places them beyond")]
    PoleOutOfRange { j: f64, max: f64 },

    #[error("localized modes exist only for j > 1, got j = {0}")]
    NoLocalizedMode(f64),

    #[error("quadrature did not converge: value {value}, error estimate {error:e} after {evaluations} evaluations")]
    Quadrature {
        value: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("density matrix is not a valid state: {0}")]
    InvalidState(String),

    #[error("reduced state is not U(1)-symmetric: conditional entropy changes by {0:e} with the measurement azimuth")]
    NotXState(f64),

    #[error("measurement optimization did not converge: best {best} with bracket [{lo}, {hi}]")]
    Optimizer { best: f64, lo: f64, hi: f64 },

    #[error("exact diagonalization is limited to {max} spins, got {got}")]
    TooManySpins { got: usize, max: usize },

    #[error("many-body ground state is degenerate (gap {0:e}); perturb h by 1e-6")]
    DegenerateGroundState(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
