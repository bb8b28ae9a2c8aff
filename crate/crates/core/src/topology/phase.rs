use rayon::prelude::*;

use crate::model::{BzGrid, CouplingSet, Regime};
use crate::scalar::{fmt_sci, Real};

use super::{winding_pair, Nssh1Family, Nssh2Family, TopologyError, WindingResult};

/// |δ − boundary| below this is reported as critical rather than labeled.
pub const CRITICAL_BAND: f64 = 1e-6;

/// Lower edge (1−e^θ)/(1+e^θ) of the Möbius window.
pub fn moebius_lower_bound<T: Real>(theta: T) -> T {
    let e = theta.exp();
    (T::one() - e) / (T::one() + e)
}

/// Gap-closing point of the imaginary regime,
/// δ₀ = (1 − √((1+e^{2θ})/2)) / (1 + √((1+e^{2θ})/2)).
pub fn delta0<T: Real>(theta: T) -> T {
    let r = ((T::one() + (theta + theta).exp()) * T::lit(0.5)).sqrt();
    (T::one() - r) / (T::one() + r)
}

/// The two fixed exceptional points (w_l−w_r)/2·x̂ and its negative in the
/// d_x^r–d_y^r plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpPair<T: Real> {
    pub ep1: [T; 2],
    pub ep2: [T; 2],
    /// θ = 0: both EPs sit at the origin.
    pub degenerate: bool,
}

pub fn ep_locations_nssh2<T: Real>(c: &CouplingSet<T>) -> EpPair<T> {
    let d = c.pairing();
    EpPair { ep1: [d, T::zero()], ep2: [-d, T::zero()], degenerate: d == T::zero() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PhaseKind {
    Trivial,
    Moebius,
    NonTrivial,
    Critical,
}

impl PhaseKind {
    pub fn name(self) -> &'static str {
        match self {
            PhaseKind::Trivial => "trivial",
            PhaseKind::Moebius => "moebius",
            PhaseKind::NonTrivial => "nontrivial",
            PhaseKind::Critical => "critical",
        }
    }

    pub fn nu(self) -> Option<f64> {
        match self {
            PhaseKind::Trivial => Some(0.0),
            PhaseKind::Moebius => Some(0.5),
            PhaseKind::NonTrivial => Some(1.0),
            PhaseKind::Critical => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseLabel<T: Real> {
    pub kind: PhaseKind,
    /// δ thresholds used; equal in the imaginary regime.
    pub boundaries: (T, T),
}

/// Trivial below (1−e^θ)/(1+e^θ), Möbius between it and 0, NonTrivial above 0.
pub fn classify_phase_real<T: Real>(c: &CouplingSet<T>) -> PhaseLabel<T> {
    let lo = moebius_lower_bound(c.theta());
    let hi = T::zero();
    let d = c.delta();
    let band = T::lit(CRITICAL_BAND);
    let kind = if (d - lo).abs() < band || (d - hi).abs() < band {
        PhaseKind::Critical
    } else if d < lo {
        PhaseKind::Trivial
    } else if d < hi {
        PhaseKind::Moebius
    } else {
        PhaseKind::NonTrivial
    };
    PhaseLabel { kind, boundaries: (lo, hi) }
}

/// X(k) = v² + v(w_r + w_l) cos k + w_r w_l
pub fn nssh1_x<T: Real>(k: T, v: T, w_r: T, w_l: T) -> T {
    v * v + v * (w_r + w_l) * k.cos() + w_r * w_l
}

/// Y(k) = (w_l − w_r)(v cos k + (w_r + w_l)/2)
pub fn nssh1_y<T: Real>(k: T, v: T, w_r: T, w_l: T) -> T {
    (w_l - w_r) * (v * k.cos() + (w_r + w_l) * T::lit(0.5))
}

/// Location of the single EP of the nSSH1 chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Nssh1Ep<T: Real> {
    pub v_critical: T,
    pub k_star: T,
    pub delta0: T,
}

pub fn ep_nssh1<T: Real>(c: &CouplingSet<T>) -> Result<Nssh1Ep<T>, TopologyError> {
    let (wr, wl) = (c.w_r(), c.w_l());
    let sq = wr * wr + wl * wl;
    let v_critical = (sq * T::lit(0.5)).sqrt();
    let arg = -(wr + wl) / (T::lit(2.0) * sq).sqrt();
    let tol = T::lit(1e-12);
    if arg < -T::one() - tol || arg > T::one() + tol {
        return Err(TopologyError::ArccosDomain(arg.to_f64_lossy()));
    }
    let k_star = arg.max(-T::one()).min(T::one()).acos();
    Ok(Nssh1Ep { v_critical, k_star, delta0: delta0(c.theta()) })
}

/// Winding of the single-EP Bloch vector, cross-checked against δ ≶ δ₀.
pub fn classify_phase_imag<T: Real>(c: &CouplingSet<T>, grid: &BzGrid<T>) -> Result<PhaseLabel<T>, TopologyError> {
    let d0 = delta0(c.theta());
    let boundaries = (d0, d0);
    let offset = c.delta() - d0;
    if offset.abs() < T::lit(CRITICAL_BAND) {
        return Ok(PhaseLabel { kind: PhaseKind::Critical, boundaries });
    }
    let w = winding_pair(&Nssh1Family(*c), grid)?;
    let nu = w.nu.round();
    let expect = if offset > T::zero() { T::one() } else { T::zero() };
    if (w.nu - expect).abs() > T::lit(1e-3) {
        return Err(TopologyError::Inconsistent { nu: w.nu.to_f64_lossy(), offset: offset.to_f64_lossy() });
    }
    let kind = if nu > T::lit(0.5) { PhaseKind::NonTrivial } else { PhaseKind::Trivial };
    Ok(PhaseLabel { kind, boundaries })
}

/// One (δ, θ) point of a phase diagram.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseRow<T: Real> {
    pub delta: T,
    pub theta: T,
    /// NaN where the winding is undefined (critical points).
    pub winding: WindingResult<T>,
    pub kind: PhaseKind,
}

/// ν and labels over a θ-major (δ, θ) grid. Points sitting on an EP get
/// NaN windings and the critical label.
pub fn phase_diagram<T: Real>(
    j: T,
    deltas: &[T],
    thetas: &[T],
    regime: Regime,
    grid: &BzGrid<T>,
) -> Result<Vec<PhaseRow<T>>, TopologyError> {
    let points: Vec<(T, T)> = thetas.iter().flat_map(|&th| deltas.iter().map(move |&d| (d, th))).collect();
    points
        .par_iter()
        .map(|&(d, th)| {
            let c = CouplingSet::new(j, d, th)?;
            let kind = match regime {
                Regime::Real => classify_phase_real(&c).kind,
                Regime::Imaginary => classify_phase_imag(&c, grid)?.kind,
            };
            let w = match regime {
                Regime::Real => winding_pair(&Nssh2Family(c), grid),
                Regime::Imaginary => winding_pair(&Nssh1Family(c), grid),
            };
            let winding = match (w, kind) {
                (Ok(w), _) => w,
                (Err(_), PhaseKind::Critical) => {
                    let nan = T::lit(f64::NAN);
                    WindingResult { nu1: nan, nu2: nan, nu: nan, grid_size: grid.len(), imag_residual: nan }
                }
                (Err(e), _) => return Err(e),
            };
            Ok(PhaseRow { delta: d, theta: th, winding, kind })
        })
        .collect()
}

pub fn phase_diagram_csv<T: Real>(rows: &[PhaseRow<T>]) -> String {
    let mut out = String::from("delta,theta,nu1,nu2,nu,label\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_sci(r.delta.to_f64_lossy()),
            fmt_sci(r.theta.to_f64_lossy()),
            fmt_sci(r.winding.nu1.to_f64_lossy()),
            fmt_sci(r.winding.nu2.to_f64_lossy()),
            fmt_sci(r.winding.nu.to_f64_lossy()),
            r.kind.name()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(d: f64, th: f64) -> CouplingSet<f64> {
        CouplingSet::new(1.0, d, th).unwrap()
    }

    #[test]
    fn ep_pair() {
        let e = ep_locations_nssh2(&c(0.3, 0.0));
        assert!(e.degenerate && e.ep1 == [0.0, 0.0] && e.ep2 == [0.0, 0.0]);
        let e = ep_locations_nssh2(&c(0.9, 0.4));
        assert!((e.ep1[0] - 0.4672).abs() < 1e-4);
        assert_eq!(e.ep2, [-e.ep1[0], -e.ep1[1]]);
    }

    #[test]
    fn real_labels() {
        assert_eq!(classify_phase_real(&c(-0.9, 0.4)).kind, PhaseKind::Trivial);
        assert_eq!(classify_phase_real(&c(-0.1, 0.4)).kind, PhaseKind::Moebius);
        assert_eq!(classify_phase_real(&c(0.9, 0.4)).kind, PhaseKind::NonTrivial);
        assert_eq!(classify_phase_real(&c(0.0, 0.4)).kind, PhaseKind::Critical);
        let l = classify_phase_real(&c(0.2, 0.0));
        assert_eq!(l.boundaries, (0.0, 0.0));
        assert!((moebius_lower_bound(0.4_f64) + 0.19738).abs() < 1e-5);
    }

    #[test]
    fn single_ep() {
        let e = ep_nssh1(&c(0.3, 0.0)).unwrap();
        assert!((e.v_critical - 1.3).abs() < 1e-15);
        assert_eq!(e.delta0, 0.0);
        assert!((e.k_star - std::f64::consts::PI).abs() < 1e-7);
        let cs = c(0.3, 0.4);
        let e = ep_nssh1(&cs).unwrap();
        assert!((e.delta0 + 0.118923).abs() < 1e-6);
        let (wr, wl) = (cs.w_r(), cs.w_l());
        assert!(nssh1_x(e.k_star, e.v_critical, wr, wl).abs() < 1e-10);
        assert!(nssh1_y(e.k_star, e.v_critical, wr, wl).abs() < 1e-10);
    }

    #[test]
    fn imaginary_labels() {
        let g = BzGrid::uniform(2001).unwrap();
        assert_eq!(classify_phase_imag(&c(-0.5, 0.4), &g).unwrap().kind, PhaseKind::Trivial);
        assert_eq!(classify_phase_imag(&c(0.5, 0.4), &g).unwrap().kind, PhaseKind::NonTrivial);
        assert_eq!(classify_phase_imag(&c(-0.2, 0.0), &g).unwrap().kind, PhaseKind::Trivial);
        let d0 = delta0(0.4);
        assert_eq!(classify_phase_imag(&c(d0, 0.4), &g).unwrap().kind, PhaseKind::Critical);
    }

    #[test]
    fn diagram_csv() {
        let g = BzGrid::uniform(401).unwrap();
        let rows = phase_diagram(1.0, &[-0.5, 0.0, 0.5], &[0.0, 0.4], Regime::Real, &g).unwrap();
        assert_eq!(rows.len(), 6);
        let csv = phase_diagram_csv(&rows);
        assert!(csv.starts_with("delta,theta,nu1,nu2,nu,label\n"));
        assert!(csv.contains("critical"));
        assert_eq!(csv.lines().count(), 7);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn imaginary_winding_tracks_delta0(th in 0.0f64..1.0, d in -0.9f64..0.9) {
            prop_assume!((d - delta0(th)).abs() > 0.01);
            let g = BzGrid::uniform(2001).unwrap();
            let l = classify_phase_imag(&c(d, th), &g).unwrap();
            let expect = if d > delta0(th) { PhaseKind::NonTrivial } else { PhaseKind::Trivial };
            prop_assert_eq!(l.kind, expect);
        }
    }
}
