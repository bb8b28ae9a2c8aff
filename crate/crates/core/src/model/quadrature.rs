use nalgebra::DMatrix;

use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

use super::{Closure, CouplingSet, ModelError};

/// Real quadrature dynamical matrices of the imaginary-regime chain, with
/// Ẋ = h_x X and Ṗ = h_p P in the order (1A, 1B, 1C, 1D, 2A, …).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureMatrices<T: Real> {
    pub h_x: DMatrix<T>,
    pub h_p: DMatrix<T>,
}

impl<T: Real> QuadratureMatrices<T> {
    pub fn cells(&self) -> usize {
        self.h_x.nrows() / 4
    }

    pub fn h_x_complex(&self) -> ComplexMatrix<T> {
        ComplexMatrix::from_real(&self.h_x).with_label("X(1A, 1B, 1C, 1D, ...)")
    }

    pub fn h_p_complex(&self) -> ComplexMatrix<T> {
        ComplexMatrix::from_real(&self.h_p).with_label("P(1A, 1B, 1C, 1D, ...)")
    }
}

/// Heisenberg equations of the X and P quadratures written as matrices.
/// The two sectors differ only in the sign of the (w_l−w_r)/2 terms.
pub fn quadrature_dynamical<T: Real>(
    c: &CouplingSet<T>,
    n: usize,
    closure: Closure,
) -> Result<QuadratureMatrices<T>, ModelError> {
    if n < 2 {
        return Err(ModelError::TooFewCells(n));
    }
    let build = |dsign: T| {
        let (v, s, d) = (c.v(), c.hopping_mean(), c.pairing() * dsign);
        let mut h = DMatrix::from_element(4 * n, 4 * n, T::zero());
        let at = |cell: usize, sub: usize| 4 * cell + sub;
        let prev = |j: usize| match (j, closure) {
            (0, Closure::Open) => None,
            (0, Closure::Periodic) => Some(n - 1),
            _ => Some(j - 1),
        };
        let next = |j: usize| match (j + 1 == n, closure) {
            (true, Closure::Open) => None,
            (true, Closure::Periodic) => Some(0),
            _ => Some(j + 1),
        };
        let (a, b, cc, dd) = (0, 1, 2, 3);
        for j in 0..n {
            h[(at(j, a), at(j, b))] += v;
            h[(at(j, b), at(j, a))] -= v;
            h[(at(j, cc), at(j, dd))] -= v;
            h[(at(j, dd), at(j, cc))] += v;
            if let Some(p) = prev(j) {
                h[(at(j, a), at(p, b))] += s;
                h[(at(j, a), at(p, dd))] += d;
                h[(at(j, cc), at(p, dd))] -= s;
                h[(at(j, cc), at(p, b))] += d;
            }
            if let Some(q) = next(j) {
                h[(at(j, b), at(q, a))] -= s;
                h[(at(j, b), at(q, cc))] += d;
                h[(at(j, dd), at(q, cc))] += s;
                h[(at(j, dd), at(q, a))] += d;
            }
        }
        h
    };
    Ok(QuadratureMatrices { h_x: build(T::one()), h_p: build(-T::one()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_zero_decouples_ab_from_cd() {
        let c = CouplingSet::<f64>::new(1.0, 0.3, 0.0).unwrap();
        let q = quadrature_dynamical(&c, 3, Closure::Open).unwrap();
        assert_eq!(q.h_x, q.h_p);
        for i in 0..12 {
            for j in 0..12 {
                let ab = |x: usize| x % 4 < 2;
                if ab(i) != ab(j) {
                    assert_eq!(q.h_x[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn x_and_p_differ_only_by_pairing_sign() {
        let c = CouplingSet::<f64>::new(1.0, -0.2, 0.6).unwrap();
        let q = quadrature_dynamical(&c, 4, Closure::Periodic).unwrap();
        let d = c.pairing();
        for (&x, &p) in q.h_x.iter().zip(q.h_p.iter()) {
            let same = (x - p).abs() < 1e-15;
            let flipped = (x + p).abs() < 1e-15 && (x.abs() - d.abs()).abs() < 1e-15;
            assert!(same || flipped);
        }
    }

    #[test]
    fn needs_two_cells() {
        let c = CouplingSet::<f64>::new(1.0, 0.0, 0.0).unwrap();
        assert!(quadrature_dynamical(&c, 1, Closure::Open).is_err());
    }
}
