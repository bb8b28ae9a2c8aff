use nalgebra::DMatrix;

use crate::matrix::{max_abs_diff, ComplexMatrix};
use crate::scalar::{cre, Cx, Real};

use super::{Closure, CouplingSet, ModelError, Regime};

const SUBLATTICES: [char; 4] = ['A', 'B', 'C', 'D'];

/// Unit-cell-major ladder ordering: a_{1A..1D}, …, a_{NA..ND}, then the
/// creation operators in the same order.
pub fn realspace_basis_label(n: usize) -> String {
    let ann: Vec<String> = (1..=n)
        .flat_map(|i| SUBLATTICES.iter().map(move |s| format!("a_{i}{s}")))
        .collect();
    let cre: Vec<String> = (1..=n)
        .flat_map(|i| SUBLATTICES.iter().map(move |s| format!("a+_{i}{s}")))
        .collect();
    format!("({}, {})", ann.join(", "), cre.join(", "))
}

/// Number-conserving block K and pairing block Δ of the real-space chain,
/// so that H = [[K, Δ], [Δ*, Kᵀ]] in the ladder basis.
///
/// Intercell terms i → i+1 run over i = 1..N−1 for an open chain and wrap
/// around for a periodic one.
pub fn realspace_blocks<T: Real>(
    c: &CouplingSet<T>,
    n: usize,
    r: Regime,
    closure: Closure,
) -> Result<(DMatrix<Cx<T>>, DMatrix<Cx<T>>), ModelError> {
    if n < 2 {
        return Err(ModelError::TooFewCells(n));
    }
    let (v, s, d) = c.regime_couplings(r);
    let dim = 4 * n;
    let zero = cre(T::zero());
    let mut k = DMatrix::from_element(dim, dim, zero);
    let mut delta = DMatrix::from_element(dim, dim, zero);
    let idx = |cell: usize, sub: usize| 4 * (cell % n) + sub;
    let (a, b, cc, dd) = (0, 1, 2, 3);

    let mut hop = |i: usize, j: usize, t: Cx<T>| {
        k[(i, j)] += t;
        k[(j, i)] += t.conj();
    };
    for i in 0..n {
        hop(idx(i, a), idx(i, b), v);
        hop(idx(i, cc), idx(i, dd), -v);
    }
    let bonds = match closure {
        Closure::Open => n - 1,
        Closure::Periodic => n,
    };
    for i in 0..bonds {
        hop(idx(i + 1, a), idx(i, b), s);
        hop(idx(i + 1, cc), idx(i, dd), -s);
    }
    let mut pair = |i: usize, j: usize, t: Cx<T>| {
        delta[(i, j)] += t;
        delta[(j, i)] += t;
    };
    for i in 0..bonds {
        pair(idx(i, b), idx(i + 1, cc), d);
        pair(idx(i, dd), idx(i + 1, a), -d.conj());
    }
    Ok((k, delta))
}

/// Hermitian coefficient matrix of the real-space bosonic Hamiltonian.
pub fn realspace_hamiltonian<T: Real>(
    c: &CouplingSet<T>,
    n: usize,
    r: Regime,
    closure: Closure,
) -> Result<ComplexMatrix<T>, ModelError> {
    let (k, delta) = realspace_blocks(c, n, r, closure)?;
    let dim = k.nrows();
    let mut h = DMatrix::from_element(2 * dim, 2 * dim, cre(T::zero()));
    h.view_mut((0, 0), (dim, dim)).copy_from(&k);
    h.view_mut((0, dim), (dim, dim)).copy_from(&delta);
    h.view_mut((dim, 0), (dim, dim)).copy_from(&delta.map(|z| z.conj()));
    h.view_mut((dim, dim), (dim, dim)).copy_from(&k.transpose());
    Ok(ComplexMatrix::new(h, realspace_basis_label(n)))
}

/// Real-space dynamical matrix G = Γ₃H, Γ₃ = σ₃ ⊗ I_{4N}.
pub fn realspace_dynamical<T: Real>(
    c: &CouplingSet<T>,
    n: usize,
    r: Regime,
    closure: Closure,
) -> Result<ComplexMatrix<T>, ModelError> {
    let (k, delta) = realspace_blocks(c, n, r, closure)?;
    let g = build_dynamical_from_blocks(&k, &delta)?;
    Ok(g.with_label(realspace_basis_label(n)))
}

/// G = [[K, Δ], [−Δ*, −Kᵀ]] after checking K = K† and Δ = Δᵀ.
pub fn build_dynamical_from_blocks<T: Real>(
    k: &DMatrix<Cx<T>>,
    delta: &DMatrix<Cx<T>>,
) -> Result<ComplexMatrix<T>, ModelError> {
    let (n, m) = k.shape();
    if n != m || delta.shape() != (n, n) {
        return Err(ModelError::BlockShape(n, m, delta.nrows(), delta.ncols()));
    }
    let tol = T::lit(1e-12);
    let herm = max_abs_diff(k, &k.adjoint());
    if herm > tol {
        return Err(ModelError::KNotHermitian(herm.to_f64_lossy()));
    }
    let sym = max_abs_diff(delta, &delta.transpose());
    if sym > tol {
        return Err(ModelError::DeltaNotSymmetric(sym.to_f64_lossy()));
    }
    let mut g = DMatrix::from_element(2 * n, 2 * n, cre(T::zero()));
    g.view_mut((0, 0), (n, n)).copy_from(k);
    g.view_mut((0, n), (n, n)).copy_from(delta);
    g.view_mut((n, 0), (n, n)).copy_from(&delta.map(|z| -z.conj()));
    g.view_mut((n, n), (n, n)).copy_from(&(-k.transpose()));
    Ok(ComplexMatrix::unlabeled(g))
}
