//! Quantum and semiclassical dynamics of pump-mode state formation in
//! second-harmonic generation.
//!
//! The pump mode starts in a coherent state, the harmonic in vacuum, and the
//! two exchange energy through the two-photon coupling `a₁†² a₂ + a₁² a₂†`.
//! Because that coupling conserves `n₁ + 2 n₂`, the joint Fock space splits
//! into small independent blocks, which keeps exact evolution cheap up to
//! pump photon numbers of a few thousand. Past that, a classical trajectory
//! ensemble with Gaussian-sampled input fluctuations takes over.
//!
//! Module map:
//! - [`hilbert`]: block-structured two-mode Fock states;
//! - [`propagator`]: exact block evolution plus the single-mode Kerr propagator;
//! - [`observables`]: reduced pump density matrix, purity, cat fidelity,
//!   quadrature variances;
//! - [`wigner`]: Wigner quasiprobability grids, marginals, negativity;
//! - [`twigner`]: truncated-Wigner-style trajectory ensembles;
//! - [`analysis`]: depletion-revival extremum location and power-law fits.

pub mod analysis;
mod error;
pub mod hilbert;
pub mod linalg;
pub mod observables;
pub mod propagator;
pub mod twigner;
pub mod wigner;

pub use error::{Error, Result};

pub(crate) type C64 = num_complex::Complex64;
