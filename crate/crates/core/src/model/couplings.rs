use std::fmt;

use crate::scalar::{cre, imag_unit, Cx, Real};

use super::ModelError;

/// Physical parameters (J, δ, θ) together with the derived couplings
/// v = J(1−δ), w_r = J(1+δ), w_l = w_r e^θ. Fields are private so the two
/// parameterizations can never drift apart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingSet<T: Real> {
    j: T,
    delta: T,
    theta: T,
    v: T,
    w_r: T,
    w_l: T,
}

impl<T: Real> CouplingSet<T> {
    pub fn new(j: T, delta: T, theta: T) -> Result<Self, ModelError> {
        if !(j > T::zero()) || !j.is_finite() {
            return Err(ModelError::NonPositiveJ(j.to_f64_lossy()));
        }
        if !delta.is_finite() {
            return Err(ModelError::NonFiniteDelta(delta.to_f64_lossy()));
        }
        if !(theta >= T::zero()) || !theta.is_finite() {
            return Err(ModelError::NegativeTheta(theta.to_f64_lossy()));
        }
        let v = j * (T::one() - delta);
        let w_r = j * (T::one() + delta);
        let w_l = w_r * theta.exp();
        Ok(Self { j, delta, theta, v, w_r, w_l })
    }

    pub fn j(&self) -> T {
        self.j
    }
    pub fn delta(&self) -> T {
        self.delta
    }
    pub fn theta(&self) -> T {
        self.theta
    }
    pub fn v(&self) -> T {
        self.v
    }
    pub fn w_r(&self) -> T {
        self.w_r
    }
    pub fn w_l(&self) -> T {
        self.w_l
    }

    /// (w_l + w_r)/2
    pub fn hopping_mean(&self) -> T {
        (self.w_l + self.w_r) * T::lit(0.5)
    }

    /// (w_l − w_r)/2, the pairing amplitude of the bosonic chain.
    pub fn pairing(&self) -> T {
        (self.w_l - self.w_r) * T::lit(0.5)
    }

    pub fn is_hermitian_limit(&self) -> bool {
        self.theta == T::zero()
    }

    /// (v, s, d) as they enter the bosonic Hamiltonian, multiplied by i in
    /// the imaginary regime.
    pub fn regime_couplings(&self, regime: Regime) -> (Cx<T>, Cx<T>, Cx<T>) {
        let f = match regime {
            Regime::Real => cre(T::one()),
            Regime::Imaginary => imag_unit(),
        };
        (f * self.v, f * self.hopping_mean(), f * self.pairing())
    }
}

impl<T: Real> fmt::Display for CouplingSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "J={} delta={} theta={} (v={}, w_r={}, w_l={})",
            self.j, self.delta, self.theta, self.v, self.w_r, self.w_l
        )
    }
}

/// Whether the couplings enter as written or uniformly multiplied by i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Real,
    Imaginary,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Real => "real",
            Regime::Imaginary => "imaginary",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Boundary condition of a real-space chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    Periodic,
    Open,
}

/// Strictly increasing set of momenta inside [−π, π].
#[derive(Clone, Debug, PartialEq)]
pub struct BzGrid<T: Real> {
    points: Vec<T>,
}

impl<T: Real> BzGrid<T> {
    /// n equally spaced momenta k_j = −π + 2πj/n, endpoint excluded.
    pub fn uniform(n: usize) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::BadGrid("grid must be non-empty".into()));
        }
        let nn = T::from_usize(n).unwrap();
        let points = (0..n)
            .map(|j| -T::pi() + T::two_pi() * T::from_usize(j).unwrap() / nn)
            .collect();
        Ok(Self { points })
    }

    /// k = πj/m for j = −m..=m; contains matched ±k pairs and both zone edges.
    pub fn symmetric(m: usize) -> Result<Self, ModelError> {
        if m == 0 {
            return Err(ModelError::BadGrid("half-zone point count must be positive".into()));
        }
        let mm = T::from_usize(m).unwrap();
        let points = (-(m as i64)..=(m as i64))
            .map(|j| T::pi() * T::from_i64(j).unwrap() / mm)
            .collect();
        Ok(Self { points })
    }

    pub fn from_points(points: Vec<T>) -> Result<Self, ModelError> {
        if points.is_empty() {
            return Err(ModelError::BadGrid("grid must be non-empty".into()));
        }
        let tol = T::lit(1e-12);
        for w in points.windows(2) {
            if !(w[1] > w[0]) {
                return Err(ModelError::BadGrid("momenta must be strictly increasing".into()));
            }
        }
        if points[0] < -T::pi() - tol || points[points.len() - 1] > T::pi() + tol {
            return Err(ModelError::BadGrid("momenta must lie in [-pi, pi]".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// PBC momentum-resolved family or an open chain of `cells` unit cells.
#[derive(Clone, Debug, PartialEq)]
pub enum Boundary<T: Real> {
    Periodic(BzGrid<T>),
    Open { cells: usize },
}

impl<T: Real> Boundary<T> {
    pub fn open(cells: usize) -> Result<Self, ModelError> {
        if cells < 2 {
            return Err(ModelError::TooFewCells(cells));
        }
        Ok(Boundary::Open { cells })
    }

    pub fn describe(&self) -> String {
        match self {
            Boundary::Periodic(g) => format!("pbc(nk={})", g.len()),
            Boundary::Open { cells } => format!("obc(N={cells})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_couplings() {
        let c = CouplingSet::<f64>::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!((c.v(), c.w_r(), c.w_l()), (1.0, 1.0, 1.0));

        let c = CouplingSet::<f64>::new(1.0, 0.9, 0.4).unwrap();
        assert!((c.v() - 0.1).abs() < 1e-15);
        assert!((c.w_r() - 1.9).abs() < 1e-15);
        assert!((c.w_l() - 1.9 * 0.4_f64.exp()).abs() < 1e-15);
        assert!((c.w_l() - 2.8345).abs() < 1e-4);
        assert!((c.w_r() - c.w_l() * (-0.4_f64).exp()).abs() < 1e-15);

        let c = CouplingSet::<f64>::new(1.0, -0.9, 0.0).unwrap();
        assert!((c.v() - 1.9).abs() < 1e-15 && (c.w_r() - 0.1).abs() < 1e-15);
        assert_eq!(c.w_r(), c.w_l());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(CouplingSet::new(0.0, 0.1, 0.1), Err(ModelError::NonPositiveJ(_))));
        assert!(matches!(CouplingSet::new(-1.0, 0.1, 0.1), Err(ModelError::NonPositiveJ(_))));
        assert!(matches!(CouplingSet::<f64>::new(1.0, 0.1, -0.1), Err(ModelError::NegativeTheta(_))));
        assert!(CouplingSet::<f64>::new(1.0, f64::NAN, 0.1).is_err());
    }

    #[test]
    fn grids() {
        let g = BzGrid::<f64>::uniform(4).unwrap();
        assert_eq!(g.points()[0], -std::f64::consts::PI);
        assert!((g.points()[2]).abs() < 1e-15);
        let s = BzGrid::<f64>::symmetric(3).unwrap();
        assert_eq!(s.len(), 7);
        for i in 0..7 {
            assert!((s.points()[i] + s.points()[6 - i]).abs() < 1e-15);
        }
        assert!(BzGrid::from_points(vec![0.1, 0.1]).is_err());
        assert!(BzGrid::from_points(vec![-4.0, 0.0]).is_err());
        assert!(Boundary::<f64>::open(1).is_err());
    }
}
