use rayon::prelude::*;

use crate::model::{dynamical_qb_k, realspace_dynamical, Boundary, Closure, CouplingSet, Regime};
use crate::scalar::{fmt_sci, modulus, Cx, Real};

use super::{eigvals_general, sort_lexicographic, SpectralError};

/// Unit cells used for open-chain sweeps when none is requested.
pub const DEFAULT_OBC_CELLS: usize = 40;

/// Eigenvalues of the dynamical matrix along a δ axis.
#[derive(Clone, Debug)]
pub struct SpectrumSweep<T: Real> {
    pub j: T,
    pub theta: T,
    pub regime: Regime,
    pub boundary: Boundary<T>,
    pub deltas: Vec<T>,
    /// One lexicographically sorted row per δ.
    pub values: Vec<Vec<Cx<T>>>,
}

impl<T: Real> SpectrumSweep<T> {
    /// min |λ| per δ, the spectral gap around zero.
    pub fn min_abs(&self) -> Vec<T> {
        self.values
            .iter()
            .map(|row| row.iter().fold(T::infinity(), |a, z| a.min(modulus(*z))))
            .collect()
    }

    /// max |Im λ| / max |λ| per δ.
    pub fn reality_residuals(&self) -> Vec<T> {
        self.values
            .iter()
            .map(|row| {
                let (mi, ma) = row.iter().fold((T::zero(), T::zero()), |(mi, ma), z| {
                    (mi.max(z.im.abs()), ma.max(modulus(*z)))
                });
                if ma > T::zero() { mi / ma } else { T::zero() }
            })
            .collect()
    }

    pub fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("J".into(), fmt_sci(self.j.to_f64_lossy())),
            ("theta".into(), fmt_sci(self.theta.to_f64_lossy())),
            ("regime".into(), self.regime.name().into()),
            ("boundary".into(), self.boundary.describe()),
            ("n_delta".into(), self.deltas.len().to_string()),
            ("n_values".into(), self.values.first().map_or(0, |r| r.len()).to_string()),
        ]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.metadata() {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str("delta,index,re_lambda,im_lambda\n");
        for (d, row) in self.deltas.iter().zip(&self.values) {
            let d = fmt_sci(d.to_f64_lossy());
            for (i, z) in row.iter().enumerate() {
                out.push_str(&format!(
                    "{d},{i},{},{}\n",
                    fmt_sci(z.re.to_f64_lossy()),
                    fmt_sci(z.im.to_f64_lossy())
                ));
            }
        }
        out
    }
}

fn spectrum_at<T: Real>(
    c: &CouplingSet<T>,
    r: Regime,
    b: &Boundary<T>,
) -> Result<Vec<Cx<T>>, SpectralError> {
    let mut vals = match b {
        Boundary::Periodic(grid) => {
            let mut all = Vec::with_capacity(8 * grid.len());
            for &k in grid.points() {
                all.extend(eigvals_general(dynamical_qb_k(k, c, r).data())?);
            }
            all
        }
        Boundary::Open { cells } => {
            let g = realspace_dynamical(c, *cells, r, Closure::Open)?;
            eigvals_general(g.data())?
        }
    };
    sort_lexicographic(&mut vals)?;
    Ok(vals)
}

/// Spectra of the k-resolved (PBC) or open-chain (OBC) dynamical matrix for
/// each δ of the grid. δ values are processed in parallel.
pub fn spectrum_sweep<T: Real>(
    j: T,
    theta: T,
    delta_grid: &[T],
    r: Regime,
    b: &Boundary<T>,
) -> Result<SpectrumSweep<T>, SpectralError> {
    if delta_grid.is_empty() {
        return Err(SpectralError::EmptyGrid);
    }
    if delta_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SpectralError::UnsortedGrid);
    }
    let values = delta_grid
        .par_iter()
        .map(|&d| {
            let wrap = |e: SpectralError| SpectralError::AtDelta { delta: d.to_f64_lossy(), source: Box::new(e) };
            let c = CouplingSet::new(j, d, theta).map_err(|e| wrap(e.into()))?;
            spectrum_at(&c, r, b).map_err(wrap)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SpectrumSweep { j, theta, regime: r, boundary: b.clone(), deltas: delta_grid.to_vec(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BzGrid;

    #[test]
    fn csv_layout() {
        let b = Boundary::Periodic(BzGrid::uniform(4).unwrap());
        let s = spectrum_sweep(1.0, 0.4, &[-0.5, 0.5], Regime::Real, &b).unwrap();
        assert_eq!(s.values[0].len(), 32);
        let csv = s.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# J="));
        let header = lines.iter().position(|l| !l.starts_with('#')).unwrap();
        assert_eq!(lines[header], "delta,index,re_lambda,im_lambda");
        assert_eq!(lines.len() - header - 1, 64);
    }

    #[test]
    fn bad_grids() {
        let b = Boundary::<f64>::open(3).unwrap();
        assert!(matches!(spectrum_sweep(1.0, 0.4, &[], Regime::Real, &b), Err(SpectralError::EmptyGrid)));
        assert!(matches!(spectrum_sweep(1.0, 0.4, &[0.2, 0.1], Regime::Real, &b), Err(SpectralError::UnsortedGrid)));
        assert!(matches!(spectrum_sweep(-1.0, 0.4, &[0.1], Regime::Real, &b), Err(SpectralError::AtDelta { .. })));
    }

    #[test]
    fn hermitian_limit_is_real() {
        let b = Boundary::Periodic(BzGrid::uniform(16).unwrap());
        let s = spectrum_sweep(1.0, 0.0, &[-0.5, 0.0, 0.5], Regime::Real, &b).unwrap();
        assert!(s.reality_residuals().iter().all(|&r| r < 1e-12));
    }
}
