//! Model construction: couplings, Bloch matrices, real-space Nambu matrices
//! and the quadrature representation.

mod bloch;
mod couplings;
mod kspace;
mod quadrature;
mod realspace;
pub mod symmetry;

pub use bloch::BlochVector;
pub use couplings::{Boundary, BzGrid, Closure, CouplingSet, Regime};
pub use kspace::{
    bloch_nssh1, bloch_nssh2, coupling_functions, dynamical_qb_k, energy_nssh1, energy_nssh2,
    hamiltonian_nssh2_k, hamiltonian_qb_k, nssh1_k, nssh1_p1, nssh1_p2, NAMBU_K_BASIS,
};
pub use quadrature::{quadrature_dynamical, QuadratureMatrices};
pub use realspace::{
    build_dynamical_from_blocks, realspace_basis_label, realspace_blocks, realspace_dynamical,
    realspace_hamiltonian,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("energy scale J must be positive and finite, got {0}")]
    NonPositiveJ(f64),
    #[error("theta must be finite and non-negative, got {0}")]
    NegativeTheta(f64),
    #[error("delta must be finite, got {0}")]
    NonFiniteDelta(f64),
    #[error("open chain needs at least 2 unit cells, got {0}")]
    TooFewCells(usize),
    #[error("momentum grid invalid: {0}")]
    BadGrid(String),
    #[error("K block is not Hermitian (max |K - K^dagger| = {0:e})")]
    KNotHermitian(f64),
    #[error("pairing block is not symmetric (max |D - D^T| = {0:e})")]
    DeltaNotSymmetric(f64),
    #[error("block shapes incompatible: K is {0}x{1}, Delta is {2}x{3}")]
    BlockShape(usize, usize, usize, usize),
}
