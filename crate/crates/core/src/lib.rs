//! Exact ground-state physics of an XX spin-1/2 ring with a single bond impurity.
//!
//! The ring has `2M` sites labelled by half-integers `n = -M+1/2, ..., M-1/2`; the
//! defect bond of strength `j` joins the two impurity sites `n = -1/2` and `n = +1/2`,
//! and a uniform field `h` acts on every spin. The spin model is free-fermion
//! solvable through the Jordan-Wigner transformation, and everything here is built
//! on that mapping:
//!
//! - [`model`]: lattice conventions and the single-particle hopping matrix.
//! - [`linalg`]: dense symmetric eigensolver (Householder + implicit QL) and
//!   determinant helpers.
//! - [`spectrum`]: single-particle spectrum, Dirac-sea occupation and bound states.
//! - [`corr`]: the fermion correlation matrix and spin correlators via Wick's theorem.
//! - [`tlimit`]: the thermodynamic-limit solution from the lattice Green function
//!   and the impurity T-matrix.
//! - [`qinfo`]: two-qubit reduced states, concurrence, mutual information,
//!   classical correlations and quantum discord.
//! - [`fid`]: fidelity between the ring with its impurity spins traced out and an
//!   open segment, through Dirac-sea overlap determinants.
//! - [`oracle`]: brute-force exact diagonalization used to validate all of the above.
//!
//! Energies are in units of the homogeneous coupling `J = 1`.

pub mod corr;
pub mod fid;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod qinfo;
pub mod quad;
pub mod spectrum;
pub mod tlimit;

mod error;

pub use error::{Error, Result};
pub use model::{Boundary, ModelParams, Site};
