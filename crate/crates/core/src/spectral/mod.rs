//! Eigendecomposition of non-normal matrices, block-diagonalization checks,
//! parameter sweeps and skin-effect diagnostics.

mod blocks;
mod eigen;
mod localization;
mod sweep;

pub use blocks::{block_diagonalize_imag, block_diagonalize_real, q_imag, q_real};
pub use eigen::{eig_general, eigvals_general, sort_lexicographic, EigenSystem};
pub use localization::{edge_fraction, ipr_localization, LocalizedMode};
pub use sweep::{spectrum_sweep, SpectrumSweep, DEFAULT_OBC_CELLS};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("Schur iteration did not converge within {iterations} iterations (dimension {dim})")]
    NoConvergence { iterations: usize, dim: usize },
    #[error("non-finite eigenvalue encountered")]
    NonFinite,
    #[error("empty parameter grid")]
    EmptyGrid,
    #[error("parameter axis must be strictly increasing")]
    UnsortedGrid,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("at delta = {delta}: {source}")]
    AtDelta { delta: f64, source: Box<SpectralError> },
}
