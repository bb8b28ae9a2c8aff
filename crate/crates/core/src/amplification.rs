//! Static susceptibility of the open imaginary-regime chain in the
//! quadrature basis and the sublattice-resolved directional gain it encodes.

use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

use crate::matrix::ComplexMatrix;
use crate::model::{quadrature_dynamical, Closure, CouplingSet, ModelError, QuadratureMatrices};
use crate::scalar::{cre, cx, fmt_sci, Cx, Real};
use crate::topology::{classify_phase_imag, delta0, PhaseKind, TopologyError};
use crate::model::BzGrid;

/// A direction is claimed only for a per-cell gain above this value.
pub const DIRECTION_THRESHOLD: f64 = 1.02;
/// Entries below this magnitude are left out of the log-linear gain fit.
pub const FIT_FLOOR: f64 = 1e-13;
/// Largest accepted residual/κ of a computed inverse.
pub const BACKWARD_TOL: f64 = 1e-12;
/// Scans refuse δ this close to the transition.
pub const SCAN_EXCLUSION: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmplificationError {
    #[error("h_{quadrature} is singular at delta = {delta} (transition delta0 = {delta0}, condition ~ {condition:e})")]
    Singular { quadrature: char, delta: f64, delta0: f64, condition: f64 },
    #[error("closed form needs theta = 0, got {0}")]
    NonZeroTheta(f64),
    #[error("delta = {delta} lies within {SCAN_EXCLUSION:e} of delta0 = {delta0}")]
    TooCloseToTransition { delta: f64, delta0: f64 },
    #[error("matrix of size {0} is not a Nambu matrix of whole unit cells")]
    NambuShape(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sector {
    /// rows (1A, 1C, 2A, 2C, …), columns (1B, 1D, 2B, 2D, …)
    Ac,
    /// rows (1B, 1D, …), columns (1A, 1C, …)
    Bd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quadrature {
    X,
    P,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Leftward,
    Rightward,
    None,
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::Ac => "AC",
            Sector::Bd => "BD",
        })
    }
}

impl fmt::Display for Quadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quadrature::X => "X",
            Quadrature::P => "P",
        })
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Leftward => "leftward",
            Direction::Rightward => "rightward",
            Direction::None => "none",
        })
    }
}

/// χ_x = h_x⁻¹ and χ_p = h_p⁻¹ for the open chain with their sublattice
/// sub-matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct SusceptibilityReport<T: Real> {
    pub chi_x: DMatrix<T>,
    pub chi_p: DMatrix<T>,
    pub chi_ac_x: DMatrix<T>,
    pub chi_ac_p: DMatrix<T>,
    pub chi_bd_x: DMatrix<T>,
    pub chi_bd_p: DMatrix<T>,
    pub params: CouplingSet<T>,
    pub cells: usize,
    /// max |χh − I| for X and P.
    pub inverse_residual: (T, T),
    /// inverse_residual divided by the condition estimate. The absolute
    /// residual of a backward-stable inverse grows like ε·κ, and κ grows
    /// like the end-to-end gain, so only this ratio stays at round-off level
    /// deep in the amplifying phase.
    pub scaled_residual: (T, T),
    /// 1-norm condition estimates ‖h‖₁‖χ‖₁ for X and P.
    pub condition: (T, T),
}

impl<T: Real> SusceptibilityReport<T> {
    pub fn sector(&self, s: Sector, q: Quadrature) -> &DMatrix<T> {
        match (s, q) {
            (Sector::Ac, Quadrature::X) => &self.chi_ac_x,
            (Sector::Ac, Quadrature::P) => &self.chi_ac_p,
            (Sector::Bd, Quadrature::X) => &self.chi_bd_x,
            (Sector::Bd, Quadrature::P) => &self.chi_bd_p,
        }
    }
}

/// Indices into the 4N quadrature vector for the A/C (even slots) and
/// B/D (odd slots) orderings: (1A, 1C, 2A, 2C, …) and (1B, 1D, 2B, 2D, …).
pub fn sublattice_indices(cells: usize) -> (Vec<usize>, Vec<usize>) {
    let ac = (0..cells).flat_map(|j| [4 * j, 4 * j + 2]).collect();
    let bd = (0..cells).flat_map(|j| [4 * j + 1, 4 * j + 3]).collect();
    (ac, bd)
}

fn one_norm<T: Real>(m: &DMatrix<T>) -> T {
    m.column_iter().map(|c| c.iter().fold(T::zero(), |a, x| a + x.abs())).fold(T::zero(), |a, b| a.max(b))
}

fn invert<T: Real>(h: &DMatrix<T>, q: char, c: &CouplingSet<T>) -> Result<(DMatrix<T>, T, T), AmplificationError> {
    let singular = |condition: f64| AmplificationError::Singular {
        quadrature: q,
        delta: c.delta().to_f64_lossy(),
        delta0: delta0(c.theta()).to_f64_lossy(),
        condition,
    };
    // Exponential amplification drives κ far beyond 1/ε without any loss of
    // elementwise accuracy, so κ alone says nothing. The inverse is rejected
    // only when LU breaks down or it is not backward stable, i.e. the
    // residual is not at round-off level relative to κ.
    let n = h.nrows();
    let chi = h.clone().lu().try_inverse().ok_or_else(|| singular(f64::INFINITY))?;
    let condition = one_norm(h) * one_norm(&chi);
    let residual = (&chi * h - DMatrix::<T>::identity(n, n)).amax();
    if !condition.is_finite() || !residual.is_finite() || residual / condition > T::lit(BACKWARD_TOL) {
        return Err(singular(condition.to_f64_lossy()));
    }
    Ok((chi, residual, condition))
}

/// Dense LU inverses of h_x and h_p for the open chain of `cells` unit
/// cells, with the A/C and B/D sub-matrices copied out.
pub fn susceptibility<T: Real>(c: &CouplingSet<T>, cells: usize) -> Result<SusceptibilityReport<T>, AmplificationError> {
    let q = quadrature_dynamical(c, cells, Closure::Open)?;
    susceptibility_from(c, &q)
}

pub fn susceptibility_from<T: Real>(
    c: &CouplingSet<T>,
    q: &QuadratureMatrices<T>,
) -> Result<SusceptibilityReport<T>, AmplificationError> {
    let cells = q.cells();
    let (chi_x, rx, cx_) = invert(&q.h_x, 'x', c)?;
    let (chi_p, rp, cp) = invert(&q.h_p, 'p', c)?;
    let (ac, bd) = sublattice_indices(cells);
    let take = |m: &DMatrix<T>, rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
    };
    Ok(SusceptibilityReport {
        chi_ac_x: take(&chi_x, &ac, &bd),
        chi_ac_p: take(&chi_p, &ac, &bd),
        chi_bd_x: take(&chi_x, &bd, &ac),
        chi_bd_p: take(&chi_p, &bd, &ac),
        chi_x,
        chi_p,
        params: *c,
        cells,
        inverse_residual: (rx, rp),
        scaled_residual: (rx / cx_, rp / cp),
        condition: (cx_, cp),
    })
}

/// |χ^AC| and |χ^BD| at θ = 0: entry (2i+a, 2j+a) equals G₀^m / v with
/// G₀ = w/v and block distance m = j − i ≥ 0 for AC (upper triangle) or
/// m = i − j ≥ 0 for BD (lower triangle); all other entries vanish.
pub fn closed_form_theta0<T: Real>(c: &CouplingSet<T>, cells: usize) -> Result<(DMatrix<T>, DMatrix<T>), AmplificationError> {
    if c.theta() != T::zero() {
        return Err(AmplificationError::NonZeroTheta(c.theta().to_f64_lossy()));
    }
    let v = c.v();
    let g0 = c.w_r() / v;
    let entry = |i: usize, j: usize, upper: bool| {
        let (ci, cj) = (i / 2, j / 2);
        if i % 2 != j % 2 {
            return T::zero();
        }
        let m = if upper { cj.checked_sub(ci) } else { ci.checked_sub(cj) };
        match m {
            Some(m) => g0.powi(m as i32) / v,
            None => T::zero(),
        }
    };
    let n = 2 * cells;
    Ok((DMatrix::from_fn(n, n, |i, j| entry(i, j, true)), DMatrix::from_fn(n, n, |i, j| entry(i, j, false))))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainProfile<T: Real> {
    pub direction: Direction,
    /// exp of the least-squares slope of log max|χ| against block distance
    /// in the dominant triangle
    pub gain_per_cell: T,
    /// max |χ| at the largest block distance of the dominant triangle
    pub end_to_end: T,
    pub sector: Sector,
    pub quadrature: Quadrature,
}

/// max |entry| at each block distance 1..N−1 of one triangle.
fn triangle_profile<T: Real>(m: &DMatrix<T>, upper: bool) -> Vec<T> {
    let cells = m.nrows() / 2;
    (1..cells)
        .map(|d| {
            let mut best = T::zero();
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let (ci, cj) = (i / 2, j / 2);
                    let dist = if upper { cj as i64 - ci as i64 } else { ci as i64 - cj as i64 };
                    if dist == d as i64 {
                        best = best.max(m[(i, j)].abs());
                    }
                }
            }
            best
        })
        .collect()
}

fn fitted_gain<T: Real>(profile: &[T]) -> T {
    let floor = T::lit(FIT_FLOOR);
    let pts: Vec<(T, T)> = profile
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > floor)
        .map(|(i, v)| (T::from_usize(i + 1).unwrap(), v.ln()))
        .collect();
    if pts.len() < 2 {
        // nothing measurable propagates: treat as full decay
        return T::zero();
    }
    let n = T::from_usize(pts.len()).unwrap();
    let mx = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let my = pts.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let sxy = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    let sxx = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    (sxy / sxx).exp()
}

/// Directional gain per sector and quadrature. The upper triangle (source
/// cell to the right of the response cell) carries leftward amplification,
/// the lower triangle rightward.
pub fn gain_metrics<T: Real>(rep: &SusceptibilityReport<T>) -> Vec<GainProfile<T>> {
    let mut out = Vec::with_capacity(4);
    for sector in [Sector::Ac, Sector::Bd] {
        for quadrature in [Quadrature::X, Quadrature::P] {
            let m = rep.sector(sector, quadrature);
            let up = triangle_profile(m, true);
            let lo = triangle_profile(m, false);
            let (gu, gl) = (fitted_gain(&up), fitted_gain(&lo));
            let (gain, profile, dir) =
                if gu >= gl { (gu, &up, Direction::Leftward) } else { (gl, &lo, Direction::Rightward) };
            let direction = if gain > T::lit(DIRECTION_THRESHOLD) { dir } else { Direction::None };
            out.push(GainProfile {
                direction,
                gain_per_cell: gain,
                end_to_end: profile.last().copied().unwrap_or(T::zero()),
                sector,
                quadrature,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow<T: Real> {
    pub delta: T,
    pub delta0: T,
    pub nu: Option<f64>,
    pub label: PhaseKind,
    pub profiles: Vec<GainProfile<T>>,
}

impl<T: Real> ScanRow<T> {
    pub fn max_end_to_end(&self) -> T {
        self.profiles.iter().fold(T::zero(), |a, p| a.max(p.end_to_end))
    }
}

/// Susceptibility gains and imaginary-regime winding along a δ grid.
pub fn amplification_phase_scan<T: Real>(
    j: T,
    theta: T,
    deltas: &[T],
    cells: usize,
) -> Result<Vec<ScanRow<T>>, AmplificationError> {
    let d0 = delta0(theta);
    let grid = BzGrid::uniform(2001)?;
    deltas
        .par_iter()
        .map(|&delta| {
            if (delta - d0).abs() < T::lit(SCAN_EXCLUSION) {
                return Err(AmplificationError::TooCloseToTransition {
                    delta: delta.to_f64_lossy(),
                    delta0: d0.to_f64_lossy(),
                });
            }
            let c = CouplingSet::new(j, delta, theta)?;
            let label = classify_phase_imag(&c, &grid)?;
            let rep = susceptibility(&c, cells)?;
            Ok(ScanRow { delta, delta0: d0, nu: label.kind.nu(), label: label.kind, profiles: gain_metrics(&rep) })
        })
        .collect()
}

pub fn scan_csv<T: Real>(rows: &[ScanRow<T>]) -> String {
    let mut out = String::from("delta,delta0,nu,label");
    for s in [Sector::Ac, Sector::Bd] {
        for q in [Quadrature::X, Quadrature::P] {
            out.push_str(&format!(",gain_{s}_{q},end_to_end_{s}_{q},direction_{s}_{q}"));
        }
    }
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}",
            fmt_sci(r.delta.to_f64_lossy()),
            fmt_sci(r.delta0.to_f64_lossy()),
            r.nu.map_or("nan".to_string(), fmt_sci),
            r.label.name()
        ));
        for p in &r.profiles {
            out.push_str(&format!(
                ",{},{},{}",
                fmt_sci(p.gain_per_cell.to_f64_lossy()),
                fmt_sci(p.end_to_end.to_f64_lossy()),
                p.direction
            ));
        }
        out.push('\n');
    }
    out
}

fn slot_label(q: Quadrature, idx: usize, rows_ac: bool) -> String {
    let cell = idx / 2 + 1;
    let sub = match (rows_ac, idx % 2) {
        (true, 0) => 'A',
        (true, _) => 'C',
        (false, 0) => 'B',
        (false, _) => 'D',
    };
    format!("{q}{cell}{sub}")
}

/// Long-format |χ| heatmap of all four sub-matrices.
pub fn heatmap_csv<T: Real>(rep: &SusceptibilityReport<T>) -> String {
    let mut out = format!(
        "# J={}\n# delta={}\n# theta={}\n# cells={}\nsector,quadrature,row,col,row_label,col_label,abs_chi\n",
        fmt_sci(rep.params.j().to_f64_lossy()),
        fmt_sci(rep.params.delta().to_f64_lossy()),
        fmt_sci(rep.params.theta().to_f64_lossy()),
        rep.cells
    );
    for s in [Sector::Ac, Sector::Bd] {
        for q in [Quadrature::X, Quadrature::P] {
            let m = rep.sector(s, q);
            let rows_ac = s == Sector::Ac;
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    out.push_str(&format!(
                        "{s},{q},{i},{j},{},{},{}\n",
                        slot_label(q, i, rows_ac),
                        slot_label(q, j, !rows_ac),
                        fmt_sci(m[(i, j)].abs().to_f64_lossy())
                    ));
                }
            }
        }
    }
    out
}

/// Ladder ↔ quadrature map T with a = (X + iP)/√2, a† = (X − iP)/√2, so
/// that (a; a†) = T (X; P).
fn ladder_map<T: Real>(m: usize) -> DMatrix<Cx<T>> {
    let h = T::one() / T::lit(2.0).sqrt();
    let mut t = DMatrix::from_element(2 * m, 2 * m, cre(T::zero()));
    for i in 0..m {
        t[(i, i)] = cre(h);
        t[(i, m + i)] = cx(T::zero(), h);
        t[(m + i, i)] = cre(h);
        t[(m + i, m + i)] = cx(T::zero(), -h);
    }
    t
}

/// T⁻¹(−iG)T: the generator of (X; P) given the Nambu dynamical matrix G
/// (d/dt (a; a†) = −iG (a; a†)). Rows and columns are ordered all X
/// (1A, 1B, …) followed by all P.
pub fn nambu_to_quadrature<T: Real>(g: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, AmplificationError> {
    let n = g.rows();
    if !n.is_multiple_of(8) || g.cols() != n {
        return Err(AmplificationError::NambuShape(n));
    }
    let t = ladder_map::<T>(n / 2);
    let t_inv = t.adjoint();
    let minus_i = cx(T::zero(), -T::one());
    let m = &t_inv * (g.data() * minus_i) * &t;
    Ok(ComplexMatrix::new(m, "(X 1A..ND, P 1A..ND)"))
}

/// (X; P) generator back to the Nambu dynamical matrix.
pub fn quadrature_to_nambu<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, AmplificationError> {
    let n = m.rows();
    if !n.is_multiple_of(8) || m.cols() != n {
        return Err(AmplificationError::NambuShape(n));
    }
    let t = ladder_map::<T>(n / 2);
    let i = cx(T::zero(), T::one());
    let g = &t * (m.data() * i) * t.adjoint();
    Ok(ComplexMatrix::new(g, crate::model::realspace_basis_label(n / 8)))
}
