use crate::model::{energy_nssh2, BzGrid, CouplingSet};
use crate::scalar::{modulus, Cx, Real};

/// Complex band energies ±E(k) followed continuously around the zone.
#[derive(Clone, Debug)]
pub struct EnergyLoops<T: Real> {
    pub k: Vec<T>,
    /// Branch started from the principal root at the first grid point.
    pub plus: Vec<Cx<T>>,
    pub minus: Vec<Cx<T>>,
    /// The continued branch returns as the other band after one turn, so
    /// the two loops form a single closed curve.
    pub merged: bool,
    /// Smallest distance between a point of one branch and any point of the other.
    pub min_separation: T,
}

pub fn parametric_energy_loops<T: Real>(c: &CouplingSet<T>, grid: &BzGrid<T>) -> EnergyLoops<T> {
    let ks = grid.points().to_vec();
    let mut plus: Vec<Cx<T>> = Vec::with_capacity(ks.len());
    for &k in &ks {
        let e = energy_nssh2(k, c);
        let e = match plus.last() {
            Some(&prev) if modulus(e + prev) < modulus(e - prev) => -e,
            _ => e,
        };
        plus.push(e);
    }
    let minus: Vec<Cx<T>> = plus.iter().map(|z| -*z).collect();
    let start = plus[0];
    let end_next = energy_nssh2(ks[0], c);
    let last = plus[plus.len() - 1];
    // continue one step past the last point back to the first momentum
    let continued = if modulus(end_next + last) < modulus(end_next - last) { -end_next } else { end_next };
    let swapped = modulus(continued - start) > modulus(continued + start);
    let mut min_sep = T::infinity();
    for p in &plus {
        for m in &minus {
            min_sep = min_sep.min(modulus(*p - *m));
        }
    }
    let merged = swapped || min_sep < T::lit(1e-8);
    EnergyLoops { k: ks, plus, minus, merged, min_separation: min_sep }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loops(d: f64, th: f64) -> EnergyLoops<f64> {
        parametric_energy_loops(&CouplingSet::new(1.0, d, th).unwrap(), &BzGrid::uniform(801).unwrap())
    }

    #[test]
    fn trivial_phase_has_two_loops() {
        let l = loops(-0.9, 0.4);
        assert!(!l.merged);
        assert!(l.plus.iter().all(|z| z.re > 0.0) || l.plus.iter().all(|z| z.re < 0.0));
    }

    #[test]
    fn moebius_phase_merges() {
        assert!(loops(-0.1, 0.4).merged);
        assert!(!loops(0.9, 0.4).merged);
    }

    #[test]
    fn hermitian_loops_are_real_segments() {
        let l = loops(0.4, 0.0);
        assert!(l.plus.iter().all(|z| z.im.abs() < 1e-12));
    }
}
