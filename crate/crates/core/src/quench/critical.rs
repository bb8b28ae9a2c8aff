use std::fmt;
use std::ops::RangeInclusive;

use crate::model::CouplingSet;
use crate::scalar::{catanh, cx, fmt_sci, Cx, Real};

use super::loschmidt::{quench_mode, QuenchMode};
use super::{csv_header, QuenchError, QuenchProtocol};

/// Branch indices searched by default.
pub const DEFAULT_N_RANGE: RangeInclusive<i64> = 0..=9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Plus => "+",
            Side::Minus => "-",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalEntry<T: Real> {
    pub n: i64,
    pub side: Side,
    pub k_c: T,
    pub t_c: T,
    /// Left side of the critical-momentum equation at k_c.
    pub residual: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalTimes<T: Real> {
    /// Sorted by t_c.
    pub entries: Vec<CriticalEntry<T>>,
}

impl<T: Real> CriticalTimes<T> {
    pub fn side(&self, side: Side) -> Vec<CriticalEntry<T>> {
        self.entries.iter().copied().filter(|e| e.side == side).collect()
    }

    pub fn times(&self) -> Vec<T> {
        self.entries.iter().map(|e| e.t_c).collect()
    }
}

fn atanh_checked<T: Real>(m: &QuenchMode<T>) -> Result<Cx<T>, QuenchError> {
    let x = m.overlap;
    let tol = T::lit(64.0) * T::EPSILON;
    if x.im.abs() <= tol * (T::one() + x.re.abs()) && x.re.abs() >= T::one() {
        return Err(QuenchError::Branch { k: m.k.to_f64_lossy(), re: x.re.to_f64_lossy(), im: x.im.to_f64_lossy() });
    }
    Ok(catanh(x))
}

fn half_odd<T: Real>(n: i64) -> T {
    T::pi() * (T::from_i64(n).unwrap() + T::lit(0.5))
}

/// Complex ω_n with g_k(−iω_n) = 0:
///   ω_n = iπ(2n+1)/(2Eᶠ) − atanh(d̂ⁱ·d̂ᶠ)/Eᶠ.
pub fn fisher_zeros<T: Real>(
    k: T,
    ci: &CouplingSet<T>,
    cf: &CouplingSet<T>,
    n_range: RangeInclusive<i64>,
) -> Result<Vec<Cx<T>>, QuenchError> {
    let m = quench_mode(k, ci, cf)?;
    let a = atanh_checked(&m)?;
    let e = m.energy_final;
    Ok(n_range.map(|n| (cx(T::zero(), half_odd::<T>(n)) - a) / e).collect())
}

/// π(n+½) Im Eᶠ − Re[(Eᶠ)* atanh(d̂ⁱ·d̂ᶠ)]; zero where a Fisher zero crosses
/// the real time axis.
pub fn critical_residual<T: Real>(k: T, ci: &CouplingSet<T>, cf: &CouplingSet<T>, n: i64) -> Result<T, QuenchError> {
    let m = quench_mode(k, ci, cf)?;
    residual_of(&m, n)
}

fn residual_of<T: Real>(m: &QuenchMode<T>, n: i64) -> Result<T, QuenchError> {
    let a = atanh_checked(m)?;
    Ok(half_odd::<T>(n) * m.energy_final.im - (m.energy_final.conj() * a).re)
}

/// t_c = [π(n+½) Re Eᶠ − Im((Eᶠ)* atanh(d̂ⁱ·d̂ᶠ))] / |Eᶠ|²
pub fn critical_time<T: Real>(k: T, ci: &CouplingSet<T>, cf: &CouplingSet<T>, n: i64) -> Result<T, QuenchError> {
    let m = quench_mode(k, ci, cf)?;
    time_of(&m, n)
}

fn time_of<T: Real>(m: &QuenchMode<T>, n: i64) -> Result<T, QuenchError> {
    let a = atanh_checked(m)?;
    let e = m.energy_final;
    Ok((half_odd::<T>(n) * e.re - (e.conj() * a).im) / e.norm_sqr())
}

/// Sign-change scan of the critical-momentum equation over each half-zone
/// of the protocol grid, refined by bisection to a bracket below 1e−12.
/// Brackets straddling a branch jump of the square root or the atanh (where
/// the left side is discontinuous rather than zero) fail the residual test
/// and are dropped, as are times outside the protocol's time span.
pub fn critical_set<T: Real>(p: &QuenchProtocol<T>, n_range: RangeInclusive<i64>) -> Result<CriticalTimes<T>, QuenchError> {
    let (ci, cf) = (p.initial(), p.final_couplings());
    let ks = p.k_grid().points();
    let t_lo = p.t_grid()[0];
    let t_hi = *p.t_grid().last().unwrap();
    let accept = T::lit(1e-9);
    let mut entries = Vec::new();

    for n in n_range {
        for side in [Side::Plus, Side::Minus] {
            let half: Vec<T> = ks
                .iter()
                .copied()
                .filter(|&k| match side {
                    Side::Plus => k >= T::zero(),
                    Side::Minus => k <= T::zero(),
                })
                .collect();
            let vals: Vec<Option<T>> = half.iter().map(|&k| critical_residual(k, ci, cf, n).ok()).collect();
            let mut roots = Vec::new();
            for j in 0..half.len() {
                let Some(fa) = vals[j] else { continue };
                if fa == T::zero() {
                    roots.push(half[j]);
                    continue;
                }
                if j + 1 == half.len() {
                    continue;
                }
                let Some(fb) = vals[j + 1] else { continue };
                if fb == T::zero() || (fa > T::zero()) == (fb > T::zero()) {
                    continue;
                }
                if let Some(k) = bisect(half[j], half[j + 1], fa, |k| critical_residual(k, ci, cf, n).ok()) {
                    roots.push(k);
                }
            }
            for k_c in roots {
                // k = 0 belongs to both halves; keep it once
                if k_c == T::zero() && side == Side::Minus {
                    continue;
                }
                let Ok(m) = quench_mode(k_c, ci, cf) else { continue };
                let (Ok(residual), Ok(t_c)) = (residual_of(&m, n), time_of(&m, n)) else { continue };
                if residual.abs() >= accept || !(t_c > T::zero()) || t_c < t_lo || t_c > t_hi {
                    continue;
                }
                entries.push(CriticalEntry { n, side, k_c, t_c, residual });
            }
        }
    }
    entries.sort_by(|a, b| a.t_c.partial_cmp(&b.t_c).unwrap());
    Ok(CriticalTimes { entries })
}

fn bisect<T: Real>(mut a: T, mut b: T, mut fa: T, f: impl Fn(T) -> Option<T>) -> Option<T> {
    let tol = T::lit(1e-12);
    for _ in 0..200 {
        if (b - a).abs() < tol {
            break;
        }
        let mid = (a + b) * T::lit(0.5);
        if mid <= a.min(b) || mid >= a.max(b) {
            break;
        }
        let fm = f(mid)?;
        if fm == T::zero() {
            return Some(mid);
        }
        if (fm > T::zero()) == (fa > T::zero()) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let fa_abs = f(a)?.abs();
    let fb_abs = f(b)?.abs();
    Some(if fa_abs <= fb_abs { a } else { b })
}

pub fn critical_csv<T: Real>(p: &QuenchProtocol<T>, c: &CriticalTimes<T>) -> String {
    let mut out = csv_header(&p.metadata(), "n,side,k_c,t_c,residual");
    for e in &c.entries {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.n,
            e.side,
            fmt_sci(e.k_c.to_f64_lossy()),
            fmt_sci(e.t_c.to_f64_lossy()),
            fmt_sci(e.residual.to_f64_lossy())
        ));
    }
    out
}
