//! Dense complex matrices tagged with the ordered basis they act on.

use std::ops::Deref;

use nalgebra::DMatrix;

use crate::scalar::{cre, modulus, Cx, Real};

/// Dense complex matrix plus a textual description of its basis ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    data: DMatrix<Cx<T>>,
    basis_label: String,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(data: DMatrix<Cx<T>>, basis_label: impl Into<String>) -> Self {
        Self { data, basis_label: basis_label.into() }
    }

    pub fn unlabeled(data: DMatrix<Cx<T>>) -> Self {
        Self::new(data, "")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::unlabeled(DMatrix::from_element(rows, cols, cre(T::zero())))
    }

    pub fn identity(n: usize) -> Self {
        Self::unlabeled(DMatrix::identity(n, n))
    }

    /// Builds from a row-major slice of entries.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[Cx<T>]) -> Self {
        Self::unlabeled(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_real(m: &DMatrix<T>) -> Self {
        Self::unlabeled(m.map(cre))
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn basis_label(&self) -> &str {
        &self.basis_label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.basis_label = label.into();
        self
    }

    pub fn data(&self) -> &DMatrix<Cx<T>> {
        &self.data
    }

    pub fn into_inner(self) -> DMatrix<Cx<T>> {
        self.data
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::new(self.data.adjoint(), self.basis_label.clone())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.data.map(|z| z.conj()), self.basis_label.clone())
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.data.transpose(), self.basis_label.clone())
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.data)
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        max_abs_diff(&self.data, &other.data)
    }

    /// Row-major copy of the entries.
    pub fn row_major(&self) -> Vec<Cx<T>> {
        let (r, c) = self.data.shape();
        let mut out = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                out.push(self.data[(i, j)]);
            }
        }
        out
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::unlabeled(self.data.kronecker(&other.data))
    }
}

impl<T: Real> Deref for ComplexMatrix<T> {
    type Target = DMatrix<Cx<T>>;
    fn deref(&self) -> &Self::Target {
        &self.data
    }
}

impl<T: Real> From<DMatrix<Cx<T>>> for ComplexMatrix<T> {
    fn from(m: DMatrix<Cx<T>>) -> Self {
        Self::unlabeled(m)
    }
}

pub fn max_abs<T: Real>(m: &DMatrix<Cx<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(modulus(*z)))
}

pub fn max_abs_diff<T: Real>(a: &DMatrix<Cx<T>>, b: &DMatrix<Cx<T>>) -> T {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter().zip(b.iter()).fold(T::zero(), |acc, (x, y)| acc.max(modulus(*x - *y)))
}

/// Block-diagonal assembly of square blocks.
pub fn block_diag<T: Real>(blocks: &[&DMatrix<Cx<T>>]) -> DMatrix<Cx<T>> {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::from_element(n, n, cre(T::zero()));
    let mut off = 0;
    for b in blocks {
        let m = b.nrows();
        out.view_mut((off, off), (m, m)).copy_from(*b);
        off += m;
    }
    out
}

/// Pauli matrices σ₀, σ_x, σ_y, σ_z.
pub mod pauli {
    use super::*;
    use crate::scalar::cx;

    fn m2<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> DMatrix<Cx<T>> {
        DMatrix::from_row_slice(2, 2, &[a, b, c, d])
    }

    pub fn s0<T: Real>() -> DMatrix<Cx<T>> {
        DMatrix::identity(2, 2)
    }

    pub fn sx<T: Real>() -> DMatrix<Cx<T>> {
        let (o, z) = (cre(T::one()), cre(T::zero()));
        m2(z, o, o, z)
    }

    pub fn sy<T: Real>() -> DMatrix<Cx<T>> {
        let z = cre(T::zero());
        m2(z, cx(T::zero(), -T::one()), cx(T::zero(), T::one()), z)
    }

    pub fn sz<T: Real>() -> DMatrix<Cx<T>> {
        let (o, z) = (cre(T::one()), cre(T::zero()));
        m2(o, z, z, -o)
    }

    /// Kronecker product of a list of factors, left to right.
    pub fn kron_all<T: Real>(factors: &[DMatrix<Cx<T>>]) -> DMatrix<Cx<T>> {
        factors
            .iter()
            .fold(DMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
    }
}

#[cfg(test)]
mod tests {
    use super::pauli::*;
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn pauli_algebra() {
        let i = cx(0.0_f64, 1.0);
        let xy = sx::<f64>() * sy::<f64>();
        assert!(max_abs_diff(&xy, &(sz::<f64>() * i)) < 1e-15);
        assert!(max_abs_diff(&(sx::<f64>() * sx::<f64>()), &s0()) < 1e-15);
    }

    #[test]
    fn kron_dimensions_and_blocks() {
        let t3 = kron_all(&[sz::<f64>(), s0(), s0()]);
        assert_eq!(t3.shape(), (8, 8));
        for j in 0..8 {
            let expect = if j < 4 { 1.0 } else { -1.0 };
            assert_eq!(t3[(j, j)], cx(expect, 0.0));
        }
    }

    #[test]
    fn row_major_roundtrip() {
        let e: Vec<Cx<f64>> = (0..6).map(|x| cx(x as f64, -(x as f64))).collect();
        let m = ComplexMatrix::from_row_slice(2, 3, &e);
        assert_eq!(m.row_major(), e);
        assert_eq!(m[(1, 0)], e[3]);
        assert_eq!(m.dagger()[(0, 1)], e[3].conj());
    }
}
