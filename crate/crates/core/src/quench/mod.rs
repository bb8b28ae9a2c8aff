//! Sudden quenches between two real-regime parameter sets: Loschmidt
//! amplitude, return rate, Fisher zeros and critical times, Pancharatnam
//! geometric phase and the half-zone dynamical topological order parameters.

mod critical;
mod loschmidt;
pub mod oracle;
mod pgp;

pub use critical::{
    critical_csv, critical_residual, critical_set, critical_time, fisher_zeros, CriticalEntry, CriticalTimes, Side,
    DEFAULT_N_RANGE,
};
pub use loschmidt::{loschmidt_gk, loschmidt_gk_complex, quench_mode, return_rate, return_rate_csv, LoschmidtResult, QuenchMode};
pub use pgp::{dtop, dtop_csv, pgp_field, pgp_grid_csv, DtopSeries, PgpField};

use thiserror::Error;

use crate::model::{BzGrid, CouplingSet, ModelError};
use crate::scalar::{fmt_sci, Real};
use crate::spectral::SpectralError;

/// Momenta per half-zone of the default grid.
pub const DEFAULT_HALF_ZONE_POINTS: usize = 1000;
/// Time samples of the default grid, endpoints included.
pub const DEFAULT_TIME_SAMPLES: usize = 800;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuenchError {
    #[error("Bloch vector at an EP (k = {k:.6}, |d.d| = {value:e}); normalization undefined")]
    ExceptionalPoint { k: f64, value: f64 },
    #[error("atanh argument {re} + {im}i lies on the branch cut at k = {k:.6}")]
    Branch { k: f64, re: f64, im: f64 },
    #[error("momentum grid lacks the partner of k = {0:.6}")]
    UnpairedMomentum(f64),
    #[error("time grid invalid: {0}")]
    BadTimes(String),
    #[error("phase increment {increment:.3} rad at t = {t:.6}, k = {k:.6} survives refinement")]
    Resolution { t: f64, k: f64, increment: f64 },
    #[error("oracle failed: {0}")]
    Oracle(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// One quench experiment: couplings before and after, the momenta probed and
/// the observation times.
#[derive(Clone, Debug, PartialEq)]
pub struct QuenchProtocol<T: Real> {
    initial: CouplingSet<T>,
    final_couplings: CouplingSet<T>,
    k_grid: BzGrid<T>,
    t_grid: Vec<T>,
}

impl<T: Real> QuenchProtocol<T> {
    pub fn new(
        initial: CouplingSet<T>,
        final_couplings: CouplingSet<T>,
        k_grid: BzGrid<T>,
        t_grid: Vec<T>,
    ) -> Result<Self, QuenchError> {
        let ks = k_grid.points();
        let tol = T::lit(1e-12) * T::pi();
        for &k in ks {
            // sorted grid: binary search for −k
            let found = ks
                .binary_search_by(|p| {
                    if (*p + k).abs() <= tol {
                        std::cmp::Ordering::Equal
                    } else if *p < -k {
                        std::cmp::Ordering::Less
                    } else {
                        std::cmp::Ordering::Greater
                    }
                })
                .is_ok();
            if !found {
                return Err(QuenchError::UnpairedMomentum(k.to_f64_lossy()));
            }
        }
        if t_grid.is_empty() {
            return Err(QuenchError::BadTimes("no time samples".into()));
        }
        if !(t_grid[0] >= T::zero()) {
            return Err(QuenchError::BadTimes("times must be non-negative".into()));
        }
        if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(QuenchError::BadTimes("times must be strictly increasing".into()));
        }
        Ok(Self { initial, final_couplings, k_grid, t_grid })
    }

    /// Symmetric grid with 1000 momenta per half-zone and 800 times spanning
    /// [0, t_max].
    pub fn with_defaults(initial: CouplingSet<T>, final_couplings: CouplingSet<T>, t_max: T) -> Result<Self, QuenchError> {
        Self::with_grids(initial, final_couplings, DEFAULT_HALF_ZONE_POINTS, DEFAULT_TIME_SAMPLES, t_max)
    }

    pub fn with_grids(
        initial: CouplingSet<T>,
        final_couplings: CouplingSet<T>,
        half_zone: usize,
        samples: usize,
        t_max: T,
    ) -> Result<Self, QuenchError> {
        if samples < 2 || !(t_max > T::zero()) {
            return Err(QuenchError::BadTimes(format!("need >= 2 samples over a positive span, got {samples}")));
        }
        let step = t_max / T::from_usize(samples - 1).unwrap();
        let t_grid = (0..samples).map(|j| step * T::from_usize(j).unwrap()).collect();
        Self::new(initial, final_couplings, BzGrid::symmetric(half_zone)?, t_grid)
    }

    pub fn initial(&self) -> &CouplingSet<T> {
        &self.initial
    }

    pub fn final_couplings(&self) -> &CouplingSet<T> {
        &self.final_couplings
    }

    pub fn k_grid(&self) -> &BzGrid<T> {
        &self.k_grid
    }

    pub fn t_grid(&self) -> &[T] {
        &self.t_grid
    }

    /// Largest spacing of the time grid.
    pub fn t_step(&self) -> T {
        self.t_grid.windows(2).fold(T::zero(), |a, w| a.max(w[1] - w[0]))
    }

    /// Mask of physically distinct momenta: k = π is dropped when −π is
    /// also on the grid, since both label the same mode.
    pub fn distinct_momenta(&self) -> Vec<bool> {
        let ks = self.k_grid.points();
        let tol = T::lit(1e-12) * T::pi();
        let has_minus_pi = ks.first().is_some_and(|&k| (k + T::pi()).abs() <= tol);
        ks.iter().map(|&k| !(has_minus_pi && (k - T::pi()).abs() <= tol)).collect()
    }

    pub fn metadata(&self) -> Vec<(String, String)> {
        let cs = |c: &CouplingSet<T>| {
            format!(
                "{};{};{}",
                fmt_sci(c.j().to_f64_lossy()),
                fmt_sci(c.delta().to_f64_lossy()),
                fmt_sci(c.theta().to_f64_lossy())
            )
        };
        vec![
            ("initial_j_delta_theta".into(), cs(&self.initial)),
            ("final_j_delta_theta".into(), cs(&self.final_couplings)),
            ("n_k".into(), self.k_grid.len().to_string()),
            ("n_t".into(), self.t_grid.len().to_string()),
        ]
    }
}

pub(crate) fn csv_header(meta: &[(String, String)], columns: &str) -> String {
    let mut out = String::new();
    for (k, v) in meta {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str(columns);
    out.push('\n');
    out
}
