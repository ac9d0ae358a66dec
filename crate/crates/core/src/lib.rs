//! Spectral analysis of the PT-symmetric quantum kicked rotor at quantum
//! resonance.
//!
//! At `hbar_eff = 4πN/M` the momentum-space Floquet operator is periodic and
//! Bloch's theorem reduces it to a dense `D x D` matrix `S(q)`, `D = b·M`.
//! This crate builds that matrix, diagonalizes it into complex quasi-energies,
//! maps where PT symmetry is spontaneously broken, and compares the level
//! statistics against Poisson, Wigner-Dyson and non-Hermitian random-matrix
//! baselines.
//!
//! Layout:
//!
//! - [`model`]: parameters, kick Fourier table, reduced Floquet matrix,
//!   symmetry residuals.
//! - [`spectrum`]: diagonalization, quasi-energies, real/complex partition.
//! - [`stats`]: unfolding, spacings, spacing ratios, Brody and mixture fits.
//! - [`rmt`]: GOE, GUE, Ginibre (class A) and class AI† baselines.
//! - [`sweep`]: phase diagrams, Bloch and k-window ensembles, `<r>`
//!   transition curves, on-disk spectrum cache.
//! - [`io`]: CSV and JSON output schemas.

pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod rmt;
pub mod spectrum;
pub mod stats;
pub mod sweep;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use model::{FloquetMatrix, KickTable, ResonanceParams, SymmetryReport};
pub use spectrum::{QESpectrum, RealComplexPartition};
