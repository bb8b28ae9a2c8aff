use nalgebra::{DMatrix, SymmetricEigen};

use crate::scalar::{cre, modulus, Cx, Real};

use super::{eig_general, SpectralError};

/// Localization summary of one right eigenvector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalizedMode<T: Real> {
    pub value: Cx<T>,
    pub ipr: T,
    /// Σ_cell cell·|ψ_cell|² with cells numbered 0..N−1.
    pub mean_position: T,
}

fn cells_of(dim: usize) -> usize {
    // 8 ladder components per unit cell in the Nambu basis
    (dim / 8).max(1)
}

fn cell_index(component: usize, dim: usize) -> usize {
    let half = (dim / 2).max(1);
    (component % half) / 4
}

/// IPR and mean cell position of every right eigenvector of a real-space
/// Nambu matrix.
///
/// Inside a degenerate eigenvalue cluster any basis of the eigenspace is
/// valid, so the cluster is first rotated to diagonalize the cell-position
/// operator. That yields the maximally localized basis and prevents
/// arbitrary mixtures of left- and right-edge states.
pub fn ipr_localization<T: Real>(a: &DMatrix<Cx<T>>) -> Result<Vec<LocalizedMode<T>>, SpectralError> {
    let es = eig_general(a)?;
    let n = es.dim();
    let scale = es.values.iter().fold(T::zero(), |m, z| m.max(modulus(*z)));
    let tol = T::lit(1e-8) * scale.max(T::one());
    let pos: Vec<T> = (0..n).map(|i| T::from_usize(cell_index(i, n)).unwrap()).collect();

    let mut vecs = es.right.clone();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && modulus(es.values[j] - es.values[j - 1]) <= tol {
            j += 1;
        }
        if j - i > 1 {
            let block = vecs.columns(i, j - i).into_owned();
            let q = block.qr().q();
            let m = q.ncols();
            let mut x = DMatrix::from_element(m, m, cre(T::zero()));
            for a_i in 0..m {
                for b_i in 0..m {
                    let mut acc = cre(T::zero());
                    for r in 0..n {
                        acc += q[(r, a_i)].conj() * q[(r, b_i)] * pos[r];
                    }
                    x[(a_i, b_i)] = acc;
                }
            }
            let se = SymmetricEigen::new(x);
            let rotated = &q * &se.eigenvectors;
            vecs.columns_mut(i, m).copy_from(&rotated);
        }
        i = j;
    }

    let cells = cells_of(n);
    let mut out = Vec::with_capacity(n);
    for (c, &value) in es.values.iter().enumerate() {
        let col = vecs.column(c);
        let norm2 = col.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
        let mut ipr = T::zero();
        let mut per_cell = vec![T::zero(); cells];
        for (r, z) in col.iter().enumerate() {
            let p = z.norm_sqr() / norm2;
            ipr += p * p;
            per_cell[cell_index(r, n).min(cells - 1)] += p;
        }
        let mean = per_cell
            .iter()
            .enumerate()
            .fold(T::zero(), |s, (k, &p)| s + T::from_usize(k).unwrap() * p);
        out.push(LocalizedMode { value, ipr, mean_position: mean });
    }
    Ok(out)
}

/// Fraction of modes whose mean position lies within `band` (as a fraction
/// of the chain length) of either end of an N-cell chain.
pub fn edge_fraction<T: Real>(modes: &[LocalizedMode<T>], cells: usize, band: T) -> T {
    if modes.is_empty() {
        return T::zero();
    }
    let span = T::from_usize(cells.saturating_sub(1).max(1)).unwrap();
    let hits = modes
        .iter()
        .filter(|m| {
            let x = m.mean_position / span;
            x < band || x > T::one() - band
        })
        .count();
    T::from_usize(hits).unwrap() / T::from_usize(modes.len()).unwrap()
}
