//! Numerical laboratory for a Hermitian quadratic bosonic chain whose
//! dynamical matrices realize non-Hermitian SSH physics.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below are what most callers want.

// `!(x > 0)` style checks reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplification;
pub mod matrix;
pub mod model;
pub mod quench;
pub mod scalar;
pub mod spectral;
pub mod topology;

pub use matrix::ComplexMatrix;
pub use model::{BlochVector, Boundary, BzGrid, Closure, CouplingSet, Regime};
pub use scalar::{Cx, Real};

pub type CouplingSet64 = model::CouplingSet<f64>;
pub type CouplingSet32 = model::CouplingSet<f32>;
pub type ComplexMatrix64 = matrix::ComplexMatrix<f64>;
pub type BlochVector64 = model::BlochVector<f64>;
pub type BzGrid64 = model::BzGrid<f64>;
pub type Boundary64 = model::Boundary<f64>;
pub type EigenSystem64 = spectral::EigenSystem<f64>;
pub type SpectrumSweep64 = spectral::SpectrumSweep<f64>;
pub type WindingResult64 = topology::WindingResult<f64>;
pub type QuenchProtocol64 = quench::QuenchProtocol<f64>;
pub type SusceptibilityReport64 = amplification::SusceptibilityReport<f64>;
