use std::cmp::Ordering;

use faer::{c64, Mat};
use nalgebra::{DMatrix, DVector};

use crate::matrix::max_abs_diff;
use crate::scalar::{cre, cx, modulus, Cx, Real};

use super::SpectralError;

/// Eigenvalues with paired right (columns) and left (rows) eigenvectors,
/// normalized so that left · right = I.
#[derive(Clone, Debug)]
pub struct EigenSystem<T: Real> {
    pub values: Vec<Cx<T>>,
    pub right: DMatrix<Cx<T>>,
    pub left: DMatrix<Cx<T>>,
    /// ‖y_i‖‖x_i‖ / |y_i x_i|; infinite for defective eigenvalues.
    pub condition: Vec<T>,
    /// Eigenvalues belonging to a cluster whose left/right vectors are
    /// (numerically) orthogonal, i.e. an exceptional point.
    pub defective: Vec<bool>,
}

impl<T: Real> EigenSystem<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn is_defective(&self) -> bool {
        self.defective.iter().any(|&d| d)
    }

    /// max |left · right − I|
    pub fn biorthonormality_residual(&self) -> T {
        let n = self.dim();
        max_abs_diff(&(&self.left * &self.right), &DMatrix::identity(n, n))
    }

    /// max |A x_i − λ_i x_i| over all pairs.
    pub fn right_residual(&self, a: &DMatrix<Cx<T>>) -> T {
        let av = a * &self.right;
        let mut worst = T::zero();
        for (i, &l) in self.values.iter().enumerate() {
            for r in 0..self.dim() {
                worst = worst.max(modulus(av[(r, i)] - self.right[(r, i)] * l));
            }
        }
        worst
    }

    pub fn max_condition(&self) -> T {
        self.condition.iter().fold(T::zero(), |a, &b| a.max(b))
    }
}

/// Total order on complex numbers: real part, then imaginary part.
pub fn sort_lexicographic<T: Real>(values: &mut [Cx<T>]) -> Result<(), SpectralError> {
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SpectralError::NonFinite);
    }
    values.sort_by(|a, b| lex(a, b));
    Ok(())
}

fn lex<T: Real>(a: &Cx<T>, b: &Cx<T>) -> Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
}

fn check_square<T: Real>(a: &DMatrix<Cx<T>>) -> Result<(), SpectralError> {
    if a.nrows() != a.ncols() {
        return Err(SpectralError::NotSquare(a.nrows(), a.ncols()));
    }
    Ok(())
}

// The dense eigen engine works in f64; results are rounded back to T.
fn to_engine<T: Real>(a: &DMatrix<Cx<T>>, transpose: bool) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        let z = if transpose { a[(j, i)] } else { a[(i, j)] };
        c64::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
    })
}

fn from_engine<T: Real>(z: c64) -> Cx<T> {
    cx(T::lit(z.re), T::lit(z.im))
}

// Iteration budget of the engine's Hessenberg QR, per matrix dimension.
const ENGINE_SWEEPS_PER_DIM: usize = 30;

fn engine_error(n: usize) -> SpectralError {
    SpectralError::NoConvergence { iterations: ENGINE_SWEEPS_PER_DIM * n.max(1), dim: n }
}

/// Eigenvalues only, sorted lexicographically.
pub fn eigvals_general<T: Real>(a: &DMatrix<Cx<T>>) -> Result<Vec<Cx<T>>, SpectralError> {
    check_square(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let vals = to_engine(a, false).eigenvalues().map_err(|_| engine_error(n))?;
    let mut vals: Vec<Cx<T>> = vals.into_iter().map(from_engine).collect();
    sort_lexicographic(&mut vals)?;
    Ok(vals)
}

/// Eigenvalues and unit right eigenvectors from the engine.
fn engine_eigen<T: Real>(
    a: &DMatrix<Cx<T>>,
    transpose: bool,
) -> Result<(Vec<Cx<T>>, DMatrix<Cx<T>>), SpectralError> {
    let n = a.nrows();
    let e = to_engine(a, transpose).eigen().map_err(|_| engine_error(n))?;
    let (u, s) = (e.U(), e.S());
    let vals: Vec<Cx<T>> = (0..n).map(|i| from_engine(s[i])).collect();
    let mut vecs = DMatrix::from_fn(n, n, |i, j| from_engine(u[(i, j)]));
    for mut col in vecs.column_iter_mut() {
        let nrm = col.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if nrm > T::zero() {
            col /= cre(nrm);
        }
    }
    Ok((vals, vecs))
}

fn cluster_tolerance<T: Real>(a: Cx<T>, b: Cx<T>, scale: T) -> T {
    T::lit(1e-8) * modulus(a).max(modulus(b)).max(scale)
}

/// Groups sorted eigenvalue indices into clusters of mutually close values
/// (single linkage).
fn clusters<T: Real>(values: &[Cx<T>], scale: T) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut c = i;
        while p[c] != r {
            let nx = p[c];
            p[c] = r;
            c = nx;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if modulus(values[i] - values[j]) <= cluster_tolerance(values[i], values[j], scale) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj.max(ri)] = rj.min(ri);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(i);
    }
    groups
}

/// Greedy global nearest pairing: returns perm with perm[i] = index into `b`
/// matched to `a[i]`.
fn match_values<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Vec<usize> {
    let n = a.len();
    let mut pairs: Vec<(T, usize, usize)> = Vec::with_capacity(n * n);
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push((modulus(*x - *y), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(Ordering::Equal).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut done = 0;
    for (_, i, j) in pairs {
        if perm[i] == usize::MAX && !used[j] {
            perm[i] = j;
            used[j] = true;
            done += 1;
            if done == n {
                break;
            }
        }
    }
    perm
}

fn smallest_singular_value<T: Real>(m: &DMatrix<Cx<T>>) -> T {
    m.clone().singular_values().iter().fold(T::infinity(), |a, &b| a.min(b))
}

/// General complex eigendecomposition with biorthonormal left/right vectors.
///
/// Right vectors come from a dense eigendecomposition of A, left vectors
/// from an independent decomposition of Aᵀ. Degenerate clusters are biorthonormalized
/// jointly; clusters whose normalization factor falls below 1e−10 are
/// flagged defective and left unnormalized.
pub fn eig_general<T: Real>(a: &DMatrix<Cx<T>>) -> Result<EigenSystem<T>, SpectralError> {
    check_square(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(EigenSystem {
            values: vec![],
            right: DMatrix::zeros(0, 0),
            left: DMatrix::zeros(0, 0),
            condition: vec![],
            defective: vec![],
        });
    }
    let (va, xr) = engine_eigen(a, false)?;
    let (vb, zl) = engine_eigen(a, true)?;
    if va.iter().chain(vb.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SpectralError::NonFinite);
    }
    let scale = T::lit(1e-4) * va.iter().fold(T::zero(), |m, z| m.max(modulus(*z))).max(T::min_value().unwrap());

    // sort right pairs, then match left pairs onto them
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| lex(&va[i], &va[j]));
    let values: Vec<Cx<T>> = order.iter().map(|&i| va[i]).collect();
    let perm = match_values(&values, &vb);
    let mut right = DMatrix::from_element(n, n, cre(T::zero()));
    let mut left = DMatrix::from_element(n, n, cre(T::zero()));
    for (c, &i) in order.iter().enumerate() {
        right.set_column(c, &xr.column(i));
        let z: DVector<Cx<T>> = zl.column(perm[c]).into_owned();
        left.set_row(c, &z.transpose());
    }

    let mut condition = vec![T::one(); n];
    let mut defective = vec![false; n];
    for group in clusters(&values, scale) {
        let m = group.len();
        let mut yx = DMatrix::from_element(m, m, cre(T::zero()));
        for (a_i, &gi) in group.iter().enumerate() {
            for (b_i, &gj) in group.iter().enumerate() {
                yx[(a_i, b_i)] = (left.row(gi) * right.column(gj))[(0, 0)];
            }
        }
        let smin = smallest_singular_value(&yx);
        if !(smin > T::lit(1e-10)) {
            for &g in &group {
                defective[g] = true;
                condition[g] = T::infinity();
            }
            continue;
        }
        let inv = match yx.try_inverse() {
            Some(inv) => inv,
            None => {
                for &g in &group {
                    defective[g] = true;
                    condition[g] = T::infinity();
                }
                continue;
            }
        };
        let mut rows = DMatrix::from_element(m, n, cre(T::zero()));
        for (a_i, &gi) in group.iter().enumerate() {
            rows.set_row(a_i, &left.row(gi));
        }
        let fixed = inv * rows;
        for (a_i, &gi) in group.iter().enumerate() {
            left.set_row(gi, &fixed.row(a_i));
            let ny = left.row(gi).iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
            condition[gi] = ny.max(T::one());
        }
    }
    Ok(EigenSystem { values, right, left, condition, defective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{dynamical_qb_k, hamiltonian_nssh2_k, CouplingSet, Regime};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> DMatrix<Cx<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, n, |_, _| cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn diagonal_input() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![cx(1.0, 0.0), cx(0.0, 2.0)]));
        let es = eig_general(&a).unwrap();
        assert_eq!(es.values.len(), 2);
        assert!((es.values[0] - cx(0.0, 2.0)).norm() < 1e-15);
        assert!((es.values[1] - cx(1.0, 0.0)).norm() < 1e-15);
        assert!(es.biorthonormality_residual() < 1e-14);
        assert!(es.right[(1, 0)].norm() > 0.999 && es.right[(0, 1)].norm() > 0.999);
        assert!(!es.is_defective());
    }

    #[test]
    fn random_dense_matrices() {
        for seed in 0..10 {
            let a = random_matrix(12, seed);
            let es = eig_general(&a).unwrap();
            assert!(!es.is_defective());
            assert!(es.biorthonormality_residual() < 1e-9);
            assert!(es.right_residual(&a) < 1e-11);
            let ev = eigvals_general(&a).unwrap();
            for (x, y) in ev.iter().zip(es.values.iter()) {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn hermitian_input_gives_real_spectrum_and_unitary_vectors() {
        let b = random_matrix(10, 42);
        let h = &b + b.adjoint();
        let es = eig_general(&h).unwrap();
        assert!(es.values.iter().all(|z| z.im.abs() < 1e-10));
        assert!(max_abs_diff(&es.left, &es.right.adjoint()) < 1e-8);
    }

    #[test]
    fn exceptional_point_is_flagged() {
        let c = CouplingSet::new(1.0, 0.0, 0.4).unwrap(); // v = w_r
        let h = hamiltonian_nssh2_k(std::f64::consts::PI, &c);
        let es = eig_general(h.data()).unwrap();
        assert!(es.is_defective());
        assert!(es.condition.iter().all(|c| c.is_infinite()));
        let jordan = DMatrix::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)]);
        assert!(eig_general(&jordan).unwrap().is_defective());
    }

    #[test]
    fn degenerate_nondefective_cluster() {
        let mut d = DMatrix::from_diagonal(&DVector::from_vec(vec![cx(1.0, 0.0), cx(1.0, 0.0), cx(2.0, 0.0), cx(1.0, 0.0)]));
        let s = random_matrix(4, 7);
        d = &s * d * s.clone().try_inverse().unwrap();
        let es = eig_general(&d).unwrap();
        assert!(!es.is_defective());
        assert!(es.biorthonormality_residual() < 1e-8);
        assert!(es.right_residual(&d) < 1e-10);
    }

    #[test]
    fn non_square_rejected() {
        let a = DMatrix::from_element(2, 3, cx(0.0, 0.0));
        assert!(matches!(eig_general(&a), Err(SpectralError::NotSquare(2, 3))));
    }

    fn has_partner(vals: &[Cx<f64>], z: Cx<f64>) -> bool {
        vals.iter().any(|w| (w - z).norm() < 1e-9)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn dynamical_spectrum_closed_under_quadruple(k in -3.2f64..3.2, d in -0.95f64..0.95, th in 0.0f64..1.0, imag in any::<bool>()) {
            let c = CouplingSet::new(1.0, d, th).unwrap();
            let r = if imag { Regime::Imaginary } else { Regime::Real };
            let g = dynamical_qb_k(k, &c, r);
            let vals = eigvals_general(g.data()).unwrap();
            for &z in &vals {
                prop_assert!(has_partner(&vals, -z));
                prop_assert!(has_partner(&vals, z.conj()));
                prop_assert!(has_partner(&vals, -z.conj()));
            }
        }
    }
}
