//! Bloch-vector geometry, exceptional points, winding numbers and phase
//! classification for the two non-Hermitian SSH variants.

mod family;
mod loops;
mod phase;
mod winding;

pub use family::{BlochFamily, Nssh1Family, Nssh2Family};
pub use loops::{parametric_energy_loops, EnergyLoops};
pub use phase::{
    classify_phase_imag, classify_phase_real, delta0, ep_locations_nssh2, ep_nssh1, moebius_lower_bound,
    nssh1_x, nssh1_y, phase_diagram, phase_diagram_csv, EpPair, Nssh1Ep, PhaseKind, PhaseLabel, PhaseRow,
    CRITICAL_BAND,
};
pub use winding::{loop_winding_around, winding_integral, winding_pair, WindingResult, MIN_WINDING_GRID};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("winding grid needs at least {required} points, got {got}")]
    GridTooCoarse { required: usize, got: usize },
    #[error("angle increment {increment:.3} rad exceeds pi/2 near k = {k:.6}; refine the grid (EP nearby)")]
    Resolution { k: f64, increment: f64 },
    #[error("Bloch vector singular at k = {k:.6} (|d.d| = {value:e}); parameters at or near an EP")]
    Singular { k: f64, value: f64 },
    #[error("arccos argument {0} outside [-1, 1]")]
    ArccosDomain(f64),
    #[error("winding nu = {nu} disagrees with delta - delta0 = {offset:e}")]
    Inconsistent { nu: f64, offset: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}
