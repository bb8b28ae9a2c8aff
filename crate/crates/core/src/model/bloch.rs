use nalgebra::DMatrix;

use crate::scalar::{csqrt, cx, Cx, Real};

/// Planar complex Bloch vector d = d^r + i d^i of a sublattice-symmetric
/// 2×2 block H = d_x σ_x + d_y σ_y.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector<T: Real> {
    pub dr: [T; 2],
    pub di: [T; 2],
}

impl<T: Real> BlochVector<T> {
    pub fn new(dr: [T; 2], di: [T; 2]) -> Self {
        Self { dr, di }
    }

    pub fn from_complex(dx: Cx<T>, dy: Cx<T>) -> Self {
        Self { dr: [dx.re, dy.re], di: [dx.im, dy.im] }
    }

    /// Reads d off the off-diagonals of a zero-trace 2×2 block.
    pub fn from_block(h: &DMatrix<Cx<T>>) -> Self {
        let half = T::lit(0.5);
        let dx = (h[(0, 1)] + h[(1, 0)]) * half;
        let dy = (h[(1, 0)] - h[(0, 1)]) * cx(T::zero(), -half);
        Self::from_complex(dx, dy)
    }

    pub fn dx(&self) -> Cx<T> {
        cx(self.dr[0], self.di[0])
    }

    pub fn dy(&self) -> Cx<T> {
        cx(self.dr[1], self.di[1])
    }

    /// Bilinear (not Hermitian) product d·e = d_x e_x + d_y e_y.
    pub fn dot(&self, other: &Self) -> Cx<T> {
        self.dx() * other.dx() + self.dy() * other.dy()
    }

    /// d·d, whose principal square root is the band energy.
    pub fn square(&self) -> Cx<T> {
        self.dot(self)
    }

    pub fn energy(&self) -> Cx<T> {
        csqrt(self.square())
    }

    /// d·σ as a 2×2 matrix.
    pub fn to_matrix(&self) -> DMatrix<Cx<T>> {
        let i = cx(T::zero(), T::one());
        let (dx, dy) = (self.dx(), self.dy());
        DMatrix::from_row_slice(2, 2, &[cx(T::zero(), T::zero()), dx - i * dy, dx + i * dy, cx(T::zero(), T::zero())])
    }
}
