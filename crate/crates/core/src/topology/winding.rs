use crate::model::BzGrid;
use crate::scalar::{cre, modulus, wrap_angle, Cx, Real};

use super::{BlochFamily, TopologyError};

/// Minimum number of grid momenta accepted by the winding routines.
pub const MIN_WINDING_GRID: usize = 401;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindingResult<T: Real> {
    pub nu1: T,
    pub nu2: T,
    pub nu: T,
    pub grid_size: usize,
    /// |closed-loop sum of increments of the imaginary part of the complex angle|
    pub imag_residual: T,
}

fn check_grid<T: Real>(grid: &BzGrid<T>) -> Result<(), TopologyError> {
    if grid.len() < MIN_WINDING_GRID {
        return Err(TopologyError::GridTooCoarse { required: MIN_WINDING_GRID, got: grid.len() });
    }
    Ok(())
}

/// ν₁, ν₂ from the angles the real Bloch vector subtends at the two EPs,
///   tan φ₁ = (d_y^r + d_x^i)/(d_x^r − d_y^i),  tan φ₂ = (d_y^r − d_x^i)/(d_x^r + d_y^i),
/// accumulated as wrapped increments around the closed zone (last → first
/// included), and ν = (ν₁ + ν₂)/2.
pub fn winding_pair<T: Real, F: BlochFamily<T>>(
    family: &F,
    grid: &BzGrid<T>,
) -> Result<WindingResult<T>, TopologyError> {
    check_grid(grid)?;
    let ks = grid.points();
    let n = ks.len();
    let mut phi1 = Vec::with_capacity(n);
    let mut phi2 = Vec::with_capacity(n);
    let mut phii = Vec::with_capacity(n);
    for &k in ks {
        let d = family.bloch(k);
        let (xr, yr, xi, yi) = (d.dr[0], d.dr[1], d.di[0], d.di[1]);
        let (a1, b1) = (xr - yi, yr + xi);
        let (a2, b2) = (xr + yi, yr - xi);
        let tiny = T::lit(1e-14) * (T::one() + xr.abs() + yr.abs() + xi.abs() + yi.abs());
        if (a1.abs() + b1.abs()) < tiny || (a2.abs() + b2.abs()) < tiny {
            return Err(TopologyError::Singular { k: k.to_f64_lossy(), value: modulus(d.square()).to_f64_lossy() });
        }
        phi1.push(b1.atan2(a1));
        phi2.push(b2.atan2(a2));
        // e^{−2φ_i} = |d_x + i d_y| / |d_x − i d_y|; d_x + i d_y = a₁ + i b₁ and
        // d_x − i d_y = a₂ − i b₂
        let plus = (a1 * a1 + b1 * b1).sqrt();
        let minus = (a2 * a2 + b2 * b2).sqrt();
        phii.push(-(plus / minus).ln() * T::lit(0.5));
    }
    let half_pi = T::frac_pi_2();
    let mut acc = [T::zero(); 3];
    for j in 0..n {
        let nx = (j + 1) % n;
        for (slot, series) in [&phi1, &phi2].iter().enumerate() {
            let inc = wrap_angle(series[nx] - series[j]);
            if inc.abs() > half_pi {
                return Err(TopologyError::Resolution { k: ks[j].to_f64_lossy(), increment: inc.to_f64_lossy() });
            }
            acc[slot] += inc;
        }
        acc[2] += phii[nx] - phii[j];
    }
    let nu1 = acc[0] / T::two_pi();
    let nu2 = acc[1] / T::two_pi();
    Ok(WindingResult { nu1, nu2, nu: (nu1 + nu2) * T::lit(0.5), grid_size: n, imag_residual: acc[2].abs() })
}

/// Trapezoid rule for (1/2π)∮ (d_x ∂d_y − d_y ∂d_x)/(d_x² + d_y²) dk with the
/// complex Bloch vector; the real part is ν, the imaginary part a residual.
pub fn winding_integral<T: Real, F: BlochFamily<T>>(family: &F, grid: &BzGrid<T>) -> Result<Cx<T>, TopologyError> {
    check_grid(grid)?;
    let ks = grid.points();
    let n = ks.len();
    let mut f = Vec::with_capacity(n);
    for &k in ks {
        let d = family.bloch(k);
        let dd = family.derivative(k);
        let den = d.square();
        if modulus(den) < T::lit(1e-12) {
            return Err(TopologyError::Singular { k: k.to_f64_lossy(), value: modulus(den).to_f64_lossy() });
        }
        f.push((d.dx() * dd.dy() - d.dy() * dd.dx()) / den);
    }
    let mut sum = cre(T::zero());
    for j in 0..n {
        let nx = (j + 1) % n;
        let h = if nx == 0 { T::two_pi() + ks[0] - ks[j] } else { ks[nx] - ks[j] };
        sum += (f[j] + f[nx]) * (h * T::lit(0.5));
    }
    Ok(sum / T::two_pi())
}

/// Winding number of a closed planar polygon around point p.
pub fn loop_winding_around<T: Real>(points: &[[T; 2]], p: [T; 2]) -> T {
    let n = points.len();
    let ang = |q: &[T; 2]| (q[1] - p[1]).atan2(q[0] - p[0]);
    let mut acc = T::zero();
    for j in 0..n {
        acc += wrap_angle(ang(&points[(j + 1) % n]) - ang(&points[j]));
    }
    acc / T::two_pi()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CouplingSet;
    use crate::topology::{Nssh1Family, Nssh2Family};
    use proptest::prelude::*;

    fn c(d: f64) -> CouplingSet<f64> {
        CouplingSet::new(1.0, d, 0.4).unwrap()
    }

    #[test]
    fn phase_table_values() {
        let g = BzGrid::uniform(2001).unwrap();
        let expect = [(-0.9, 0.0, 0.0), (-0.1, 1.0, 0.0), (0.9, 1.0, 1.0)];
        for (d, n1, n2) in expect {
            let w = winding_pair(&Nssh2Family(c(d)), &g).unwrap();
            assert!((w.nu1 - n1).abs() < 1e-9 && (w.nu2 - n2).abs() < 1e-9, "{d}: {w:?}");
            assert!((w.nu - (n1 + n2) / 2.0).abs() < 1e-9);
            assert!(w.imag_residual < 1e-6);
        }
    }

    #[test]
    fn integral_agrees_with_pair() {
        let g = BzGrid::uniform(4001).unwrap();
        let z = winding_integral(&Nssh2Family(c(0.9)), &g).unwrap();
        assert!((z.re - 1.0).abs() < 1e-6 && z.im.abs() < 1e-6);
        let z = winding_integral(&Nssh2Family(c(-0.9)), &g).unwrap();
        assert!(z.norm() < 1e-6);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            winding_pair(&Nssh2Family(c(0.5)), &BzGrid::uniform(100).unwrap()),
            Err(TopologyError::GridTooCoarse { .. })
        ));
        // δ = 0 puts an EP exactly on the grid point k = −π
        let at_ep = CouplingSet::new(1.0, 0.0, 0.4).unwrap();
        assert!(matches!(
            winding_integral(&Nssh2Family(at_ep), &BzGrid::uniform(2001).unwrap()),
            Err(TopologyError::Singular { .. })
        ));
        assert!(winding_pair(&Nssh2Family(at_ep), &BzGrid::uniform(2001).unwrap()).is_err());
    }

    #[test]
    fn polygon_count_matches_fixed_ep_picture() {
        let g = BzGrid::uniform(2001).unwrap();
        for d in [-0.9, -0.1, 0.9] {
            let cs = c(d);
            let fam = Nssh2Family(cs);
            let pts: Vec<[f64; 2]> = g.points().iter().map(|&k| fam.bloch(k).dr).collect();
            let ep = cs.pairing();
            let w = winding_pair(&fam, &g).unwrap();
            assert!((loop_winding_around(&pts, [ep, 0.0]) - w.nu1.round()).abs() < 1e-9);
            assert!((loop_winding_around(&pts, [-ep, 0.0]) - w.nu2.round()).abs() < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn pair_and_integral_agree(d in -0.95f64..0.95, th in 0.0f64..1.0) {
            let cs = CouplingSet::new(1.0, d, th).unwrap();
            let lo = (1.0 - th.exp()) / (1.0 + th.exp());
            prop_assume!((d - lo).abs() > 0.02 && d.abs() > 0.02);
            let g = BzGrid::uniform(2001).unwrap();
            let w = winding_pair(&Nssh2Family(cs), &g).unwrap();
            let z = winding_integral(&Nssh2Family(cs), &g).unwrap();
            prop_assert!((w.nu - z.re).abs() < 1e-3);
        }

        #[test]
        fn refinement_invariance(d in -0.95f64..0.95, th in 0.0f64..1.0, single in any::<bool>()) {
            let cs = CouplingSet::new(1.0, d, th).unwrap();
            let lo = (1.0 - th.exp()) / (1.0 + th.exp());
            prop_assume!((d - lo).abs() > 0.02 && d.abs() > 0.02);
            prop_assume!(!single || (d - crate::topology::delta0(th)).abs() > 0.02);
            let (a, b) = (BzGrid::uniform(1001).unwrap(), BzGrid::uniform(4001).unwrap());
            let (wa, wb) = if single {
                (winding_pair(&Nssh1Family(cs), &a).unwrap(), winding_pair(&Nssh1Family(cs), &b).unwrap())
            } else {
                (winding_pair(&Nssh2Family(cs), &a).unwrap(), winding_pair(&Nssh2Family(cs), &b).unwrap())
            };
            prop_assert!((wa.nu1 - wb.nu1).abs() < 1e-6 && (wa.nu2 - wb.nu2).abs() < 1e-6);
        }
    }
}
