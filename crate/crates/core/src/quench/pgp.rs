use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::scalar::{carg, cre, fmt_sci, modulus, wrap_angle, Real};

use super::loschmidt::{modes, QuenchMode};
use super::{csv_header, QuenchError, QuenchProtocol};

/// |g_k| below which the phase is undefined and the sample becomes a hole.
const HOLE_TOL: f64 = 1e-13;
/// Maximum depth of the adaptive k-bisection used by the DTOP.
const REFINE_DEPTH: usize = 40;

/// Pancharatnam geometric phase on the protocol grids (rows: k, columns: t).
#[derive(Clone, Debug)]
pub struct PgpField<T: Real> {
    pub k: Vec<T>,
    pub t: Vec<T>,
    pub phi_pgp: DMatrix<T>,
    pub phi_dyn: DMatrix<T>,
    pub phi_total: DMatrix<T>,
    /// Samples where g_k = 0; their phases are interpolated for display.
    pub holes: DMatrix<bool>,
}

/// arg g_k(t) unwrapped along t for each k, minus Re[Eᶠ(d̂ⁱ·d̂ᶠ)] t.
pub fn pgp_field<T: Real>(p: &QuenchProtocol<T>) -> Result<PgpField<T>, QuenchError> {
    let ms = modes(p)?;
    let ts = p.t_grid();
    let nt = ts.len();
    let rows: Vec<(Vec<T>, Vec<T>, Vec<bool>)> = ms.par_iter().map(|m| unwrap_row(m, ts)).collect();

    let nk = ms.len();
    let phi_total = DMatrix::from_fn(nk, nt, |i, j| rows[i].0[j]);
    let phi_dyn = DMatrix::from_fn(nk, nt, |i, j| rows[i].1[j]);
    let holes = DMatrix::from_fn(nk, nt, |i, j| rows[i].2[j]);
    let phi_pgp = &phi_total - &phi_dyn;
    Ok(PgpField { k: p.k_grid().points().to_vec(), t: ts.to_vec(), phi_pgp, phi_dyn, phi_total, holes })
}

fn unwrap_row<T: Real>(m: &QuenchMode<T>, ts: &[T]) -> (Vec<T>, Vec<T>, Vec<bool>) {
    let tol = T::lit(HOLE_TOL);
    let g: Vec<_> = ts.iter().map(|&t| m.amplitude(cre(t))).collect();
    let holes: Vec<bool> = g.iter().map(|z| modulus(*z) < tol).collect();
    let mut total = vec![T::zero(); ts.len()];
    let mut last: Option<(usize, T)> = None;
    for j in 0..ts.len() {
        if holes[j] {
            continue;
        }
        let a = carg(g[j]);
        let val = match last {
            None => a,
            Some((_, prev)) => prev + wrap_angle(a - prev),
        };
        total[j] = val;
        last = Some((j, val));
    }
    fill_holes(ts, &mut total, &holes);
    let rate = m.dynamical_rate();
    let dyn_phase = ts.iter().map(|&t| rate * t).collect();
    (total, dyn_phase, holes)
}

/// Linear interpolation across holes; display only.
fn fill_holes<T: Real>(ts: &[T], vals: &mut [T], holes: &[bool]) {
    let valid: Vec<usize> = (0..vals.len()).filter(|&j| !holes[j]).collect();
    if valid.is_empty() {
        return;
    }
    for j in 0..vals.len() {
        if !holes[j] {
            continue;
        }
        let after = valid.iter().copied().find(|&v| v > j);
        let before = valid.iter().copied().rev().find(|&v| v < j);
        vals[j] = match (before, after) {
            (Some(a), Some(b)) => {
                let w = (ts[j] - ts[a]) / (ts[b] - ts[a]);
                vals[a] + (vals[b] - vals[a]) * w
            }
            (Some(a), None) => vals[a],
            (None, Some(b)) => vals[b],
            (None, None) => T::zero(),
        };
    }
}

/// Half-zone windings of the PGP at each time.
#[derive(Clone, Debug, PartialEq)]
pub struct DtopSeries<T: Real> {
    pub t: Vec<T>,
    pub dtop_plus: Vec<T>,
    pub dtop_minus: Vec<T>,
}

impl<T: Real> DtopSeries<T> {
    /// DTOP₊ + DTOP₋, the winding over the whole zone.
    pub fn full_zone(&self) -> Vec<T> {
        self.dtop_plus.iter().zip(&self.dtop_minus).map(|(a, b)| *a + *b).collect()
    }
}

/// DTOP±(t) = (1/2π) Σ wrapped k-increments of φ_pgp over [0, π] and [−π, 0].
///
/// Only φ_pgp modulo 2π matters for wrapped increments, so increments larger
/// than π/2 are resolved by bisecting the k interval and evaluating the
/// phase directly at the new momenta. Samples with g_k = 0 are skipped.
pub fn dtop<T: Real>(p: &QuenchProtocol<T>) -> Result<DtopSeries<T>, QuenchError> {
    let ms = modes(p)?;
    let (ci, cf) = (p.initial(), p.final_couplings());
    let ts = p.t_grid();
    let zero = T::zero();
    let plus: Vec<&QuenchMode<T>> = ms.iter().filter(|m| m.k >= zero).collect();
    let minus: Vec<&QuenchMode<T>> = ms.iter().filter(|m| m.k <= zero).collect();

    let per_t: Result<Vec<(T, T)>, QuenchError> = ts
        .par_iter()
        .map(|&t| {
            let eval = |k: T| -> Result<Option<T>, QuenchError> {
                let m = super::loschmidt::quench_mode(k, ci, cf)?;
                Ok(pgp_mod(&m, t))
            };
            let a = half_winding(&plus, t, &eval)?;
            let b = half_winding(&minus, t, &eval)?;
            Ok((a, b))
        })
        .collect();
    let per_t = per_t?;
    Ok(DtopSeries {
        t: ts.to_vec(),
        dtop_plus: per_t.iter().map(|x| x.0).collect(),
        dtop_minus: per_t.iter().map(|x| x.1).collect(),
    })
}

fn pgp_mod<T: Real>(m: &QuenchMode<T>, t: T) -> Option<T> {
    let g = m.amplitude(cre(t));
    if modulus(g) < T::lit(HOLE_TOL) {
        return None;
    }
    Some(carg(g) - m.dynamical_rate() * t)
}

fn half_winding<T: Real>(
    half: &[&QuenchMode<T>],
    t: T,
    eval: &impl Fn(T) -> Result<Option<T>, QuenchError>,
) -> Result<T, QuenchError> {
    let mut acc = T::zero();
    let mut prev: Option<(T, T)> = None;
    for m in half {
        let Some(phi) = pgp_mod(m, t) else { continue };
        if let Some((k0, phi0)) = prev {
            acc += resolved_increment(k0, phi0, m.k, phi, t, eval, 0)?;
        }
        prev = Some((m.k, phi));
    }
    Ok(acc / T::two_pi())
}

fn resolved_increment<T: Real>(
    k0: T,
    phi0: T,
    k1: T,
    phi1: T,
    t: T,
    eval: &impl Fn(T) -> Result<Option<T>, QuenchError>,
    depth: usize,
) -> Result<T, QuenchError> {
    let inc = wrap_angle(phi1 - phi0);
    if inc.abs() <= T::frac_pi_2() {
        return Ok(inc);
    }
    if depth >= REFINE_DEPTH {
        return Err(QuenchError::Resolution {
            t: t.to_f64_lossy(),
            k: k0.to_f64_lossy(),
            increment: inc.to_f64_lossy(),
        });
    }
    let mid = (k0 + k1) * T::lit(0.5);
    match eval(mid)? {
        Some(phim) => Ok(resolved_increment(k0, phi0, mid, phim, t, eval, depth + 1)?
            + resolved_increment(mid, phim, k1, phi1, t, eval, depth + 1)?),
        None => Ok(inc),
    }
}

pub fn dtop_csv<T: Real>(p: &QuenchProtocol<T>, d: &DtopSeries<T>) -> String {
    let mut out = csv_header(&p.metadata(), "t,dtop_plus,dtop_minus");
    for ((t, a), b) in d.t.iter().zip(&d.dtop_plus).zip(&d.dtop_minus) {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_sci(t.to_f64_lossy()),
            fmt_sci(a.to_f64_lossy()),
            fmt_sci(b.to_f64_lossy())
        ));
    }
    out
}

/// Dense (k, t, φ_pgp) dump for heatmaps; holes carry hole=1.
pub fn pgp_grid_csv<T: Real>(p: &QuenchProtocol<T>, f: &PgpField<T>) -> String {
    let mut out = csv_header(&p.metadata(), "k,t,phi_pgp,hole");
    for (i, k) in f.k.iter().enumerate() {
        let ks = fmt_sci(k.to_f64_lossy());
        for (j, t) in f.t.iter().enumerate() {
            out.push_str(&format!(
                "{ks},{},{},{}\n",
                fmt_sci(t.to_f64_lossy()),
                fmt_sci(f.phi_pgp[(i, j)].to_f64_lossy()),
                u8::from(f.holes[(i, j)])
            ));
        }
    }
    out
}
