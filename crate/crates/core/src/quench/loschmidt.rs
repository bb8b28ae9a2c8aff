use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::model::{bloch_nssh2, CouplingSet};
use crate::scalar::{ccos, cre, csin, csqrt, fmt_sci, imag_unit, modulus, Cx, Real};

use super::{csv_header, QuenchError, QuenchProtocol};

/// Per-momentum data shared by every quench observable: the final band
/// energy and the bilinear overlap of the normalized Bloch vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuenchMode<T: Real> {
    pub k: T,
    pub energy_final: Cx<T>,
    pub energy_initial: Cx<T>,
    /// d̂ⁱ·d̂ᶠ with d̂ = d/√(d·d), principal roots.
    pub overlap: Cx<T>,
}

impl<T: Real> QuenchMode<T> {
    /// cos(Eᶠt) + i(d̂ⁱ·d̂ᶠ) sin(Eᶠt) at complex time.
    pub fn amplitude(&self, t: Cx<T>) -> Cx<T> {
        let x = self.energy_final * t;
        ccos(x) + imag_unit::<T>() * self.overlap * csin(x)
    }

    /// Re[Eᶠ (d̂ⁱ·d̂ᶠ)], the rate of the dynamical phase.
    pub fn dynamical_rate(&self) -> T {
        (self.energy_final * self.overlap).re
    }
}

pub fn quench_mode<T: Real>(k: T, ci: &CouplingSet<T>, cf: &CouplingSet<T>) -> Result<QuenchMode<T>, QuenchError> {
    let di = bloch_nssh2(k, ci);
    let df = bloch_nssh2(k, cf);
    let tiny = T::lit(1e-14);
    for d in [&di, &df] {
        let sq = d.square();
        if modulus(sq) < tiny {
            return Err(QuenchError::ExceptionalPoint { k: k.to_f64_lossy(), value: modulus(sq).to_f64_lossy() });
        }
    }
    let ei = csqrt(di.square());
    let ef = csqrt(df.square());
    Ok(QuenchMode { k, energy_final: ef, energy_initial: ei, overlap: di.dot(&df) / (ei * ef) })
}

/// Loschmidt amplitude g_k(t) of the mode k for a real time t.
pub fn loschmidt_gk<T: Real>(k: T, ci: &CouplingSet<T>, cf: &CouplingSet<T>, t: T) -> Result<Cx<T>, QuenchError> {
    Ok(quench_mode(k, ci, cf)?.amplitude(cre(t)))
}

/// g_k at a complex time, used to verify Fisher zeros.
pub fn loschmidt_gk_complex<T: Real>(
    k: T,
    ci: &CouplingSet<T>,
    cf: &CouplingSet<T>,
    t: Cx<T>,
) -> Result<Cx<T>, QuenchError> {
    Ok(quench_mode(k, ci, cf)?.amplitude(t))
}

/// g_k(t) on the protocol grids together with the return rate.
#[derive(Clone, Debug)]
pub struct LoschmidtResult<T: Real> {
    pub k: Vec<T>,
    pub t: Vec<T>,
    /// rows: momenta, columns: times
    pub gk: DMatrix<Cx<T>>,
    /// −(1/N_k) Σ_k log|g_k(t)|², +∞ where some g_k vanishes.
    pub return_rate: Vec<T>,
    /// The rate is accumulated as a sum of logarithms, never as a product.
    pub log_scale: bool,
    /// Number of distinct momenta N_k entering the average.
    pub n_k: usize,
}

pub(crate) fn modes<T: Real>(p: &QuenchProtocol<T>) -> Result<Vec<QuenchMode<T>>, QuenchError> {
    p.k_grid()
        .points()
        .par_iter()
        .map(|&k| quench_mode(k, p.initial(), p.final_couplings()))
        .collect()
}

pub fn return_rate<T: Real>(p: &QuenchProtocol<T>) -> Result<LoschmidtResult<T>, QuenchError> {
    let modes = modes(p)?;
    let ts = p.t_grid();
    let rows: Vec<Vec<Cx<T>>> = modes.par_iter().map(|m| ts.iter().map(|&t| m.amplitude(cre(t))).collect()).collect();
    let gk = DMatrix::from_fn(modes.len(), ts.len(), |i, j| rows[i][j]);

    let mask = p.distinct_momenta();
    let n_k = mask.iter().filter(|&&m| m).count();
    let nk = T::from_usize(n_k).unwrap();
    let return_rate = (0..ts.len())
        .into_par_iter()
        .map(|j| {
            let mut acc = T::zero();
            for (i, keep) in mask.iter().enumerate() {
                if !keep {
                    continue;
                }
                let m2 = gk[(i, j)].norm_sqr();
                if m2 == T::zero() {
                    return T::infinity();
                }
                acc += m2.ln();
            }
            -acc / nk
        })
        .collect();
    Ok(LoschmidtResult { k: p.k_grid().points().to_vec(), t: ts.to_vec(), gk, return_rate, log_scale: true, n_k })
}

impl<T: Real> LoschmidtResult<T> {
    /// Times of kinks in the return rate. A kink shows up as a second
    /// difference far more negative (eight times) than the median magnitude
    /// of its neighbours within ten samples, the two nearest on each side
    /// excluded; adjacent flagged samples form one cusp located at the most
    /// negative second difference.
    pub fn cusp_times(&self) -> Vec<T> {
        const WINDOW: usize = 10;
        const GUARD: usize = 2;
        let r = &self.return_rate;
        if r.len() < 3 {
            return Vec::new();
        }
        let s: Vec<Option<T>> = (1..r.len() - 1)
            .map(|j| {
                let v = r[j + 1] - r[j] * T::lit(2.0) + r[j - 1];
                if v.is_finite() { Some(v) } else { None }
            })
            .collect();
        let flagged: Vec<bool> = (0..s.len())
            .map(|i| {
                let Some(v) = s[i] else { return false };
                let lo = i.saturating_sub(WINDOW);
                let hi = (i + WINDOW + 1).min(s.len());
                let mut nb: Vec<T> = (lo..hi)
                    .filter(|&j| j + GUARD < i || j > i + GUARD)
                    .filter_map(|j| s[j].map(|x| x.abs()))
                    .collect();
                if nb.is_empty() {
                    return false;
                }
                nb.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v < -nb[nb.len() / 2] * T::lit(8.0)
            })
            .collect();
        let mut out = Vec::new();
        let mut best: Option<(usize, T)> = None;
        for (i, v) in s.iter().enumerate() {
            match v {
                Some(v) if flagged[i] => {
                    if best.is_none_or(|(_, b)| *v < b) {
                        best = Some((i + 1, *v));
                    }
                }
                _ => {
                    if let Some((j, _)) = best.take() {
                        out.push(self.t[j]);
                    }
                }
            }
        }
        if let Some((j, _)) = best {
            out.push(self.t[j]);
        }
        out
    }
}

pub fn return_rate_csv<T: Real>(p: &QuenchProtocol<T>, r: &LoschmidtResult<T>) -> String {
    let mut meta = p.metadata();
    meta.push(("n_k_distinct".into(), r.n_k.to_string()));
    let mut out = csv_header(&meta, "t,return_rate");
    for (t, v) in r.t.iter().zip(&r.return_rate) {
        out.push_str(&format!("{},{}\n", fmt_sci(t.to_f64_lossy()), fmt_sci(v.to_f64_lossy())));
    }
    out
}
