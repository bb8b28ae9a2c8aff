use nalgebra::DMatrix;

use crate::matrix::{block_diag, max_abs_diff};
use crate::model::{dynamical_qb_k, hamiltonian_nssh2_k, nssh1_k, CouplingSet, Regime};
use crate::scalar::{cre, cx, Cx, Real};

fn assemble<T: Real>(blocks: [[Option<DMatrix<Cx<T>>>; 4]; 4]) -> DMatrix<Cx<T>> {
    let mut q = DMatrix::from_element(8, 8, cre(T::zero()));
    let s = T::one() / T::lit(2.0).sqrt();
    for (bi, row) in blocks.iter().enumerate() {
        for (bj, b) in row.iter().enumerate() {
            if let Some(b) = b {
                q.view_mut((2 * bi, 2 * bj), (2, 2)).copy_from(&(b * cre(s)));
            }
        }
    }
    q
}

fn diag2<T: Real>(a: Cx<T>, b: Cx<T>) -> DMatrix<Cx<T>> {
    DMatrix::from_row_slice(2, 2, &[a, cre(T::zero()), cre(T::zero()), b])
}

/// Constant unitary that splits the real-regime G(k) into four nSSH2 blocks.
pub fn q_real<T: Real>() -> DMatrix<Cx<T>> {
    let i2 = || Some(DMatrix::<Cx<T>>::identity(2, 2));
    let m2 = || Some(-DMatrix::<Cx<T>>::identity(2, 2));
    assemble([
        [i2(), None, None, i2()],
        [None, i2(), i2(), None],
        [None, m2(), i2(), None],
        [i2(), None, None, m2()],
    ])
}

/// Unitary built from eigenvectors of ΓΓ̃ that splits the imaginary-regime
/// G̃(k) into four nSSH1 blocks, ordered (H₁, −H₁, H₁†, −H₁†).
///
/// Columns 4 and 6 carry an extra sign relative to the bare γ-matrix layout;
/// without it the second and third blocks come out as (H₁, −H₁†) swapped
/// in sign. Both choices are eigenvectors of ΓΓ̃.
pub fn q_imag<T: Real>() -> DMatrix<Cx<T>> {
    let (o, z) = (T::one(), T::zero());
    let i = cx(z, o);
    let g1 = diag2(i, cre(o));
    let g2 = diag2(-i, cre(o));
    let mut q = assemble([
        [Some(g1.clone()), None, None, Some(g2.clone())],
        [None, Some(g2.clone()), Some(g1.clone()), None],
        [None, Some(&g1 * (-i)), Some(&g2 * i), None],
        [Some(&g2 * i), None, None, Some(&g1 * (-i))],
    ]);
    for col in [3, 5] {
        let neg = -q.column(col);
        q.set_column(col, &neg);
    }
    q
}

/// max |Q†G(k)Q − diag(H, −H†, −H, H†)| with H the nSSH2 Bloch matrix.
pub fn block_diagonalize_real<T: Real>(k: T, c: &CouplingSet<T>) -> T {
    let q = q_real::<T>();
    let g = dynamical_qb_k(k, c, Regime::Real);
    let h = hamiltonian_nssh2_k(k, c).into_inner();
    let hd = h.adjoint();
    let target = block_diag(&[&h, &(-&hd), &(-&h), &hd]);
    max_abs_diff(&(q.adjoint() * g.data() * &q), &target)
}

/// max |Q̃†G̃(k)Q̃ − diag(H₁, −H₁, H₁†, −H₁†)| with H₁ the nSSH1 Bloch matrix.
pub fn block_diagonalize_imag<T: Real>(k: T, c: &CouplingSet<T>) -> T {
    let q = q_imag::<T>();
    let g = dynamical_qb_k(k, c, Regime::Imaginary);
    let h = nssh1_k(k, c).into_inner();
    let hd = h.adjoint();
    let target = block_diag(&[&h, &(-&h), &hd, &(-&hd)]);
    max_abs_diff(&(q.adjoint() * g.data() * &q), &target)
}
