use nalgebra::DMatrix;

use crate::matrix::{pauli, ComplexMatrix};
use crate::scalar::{cre, csqrt, cx, unit_phase, Cx, Real};

use super::{BlochVector, CouplingSet, Regime};

/// Ordering of the momentum-space Nambu spinor.
pub const NAMBU_K_BASIS: &str = "(A_k, B_k, C_k, D_k, A+_-k, B+_-k, C+_-k, D+_-k)";

/// f1 = v + ((w_l+w_r)/2) e^{−ik}, f2 = ((w_l−w_r)/2) e^{−ik}.
pub fn coupling_functions<T: Real>(k: T, c: &CouplingSet<T>) -> (Cx<T>, Cx<T>) {
    let e = unit_phase(-k);
    (e * c.hopping_mean() + c.v(), e * c.pairing())
}

/// [[0, v + w_r e^{−ik}], [v + w_l e^{ik}, 0]]
pub fn hamiltonian_nssh2_k<T: Real>(k: T, c: &CouplingSet<T>) -> ComplexMatrix<T> {
    let z = cre(T::zero());
    let a = unit_phase(-k) * c.w_r() + c.v();
    let b = unit_phase(k) * c.w_l() + c.v();
    ComplexMatrix::from_row_slice(2, 2, &[z, a, b, z]).with_label("(a_k, b_k)")
}

pub fn bloch_nssh2<T: Real>(k: T, c: &CouplingSet<T>) -> BlochVector<T> {
    let (s, d) = (c.hopping_mean(), c.pairing());
    let (sk, ck) = (unit_phase(k).im, unit_phase(k).re);
    BlochVector::new([c.v() + s * ck, s * sk], [d * sk, -d * ck])
}

/// Principal root of v² + w_r w_l + v(w_l e^{ik} + w_r e^{−ik}); the pair is ±E.
pub fn energy_nssh2<T: Real>(k: T, c: &CouplingSet<T>) -> Cx<T> {
    let (v, wr, wl) = (c.v(), c.w_r(), c.w_l());
    let e2 = (unit_phase(k) * wl + unit_phase(-k) * wr) * v + (v * v + wr * wl);
    csqrt(e2)
}

/// p₁ = v + ((1+i)/2)(w_l − i w_r) e^{−ik}
pub fn nssh1_p1<T: Real>(k: T, c: &CouplingSet<T>) -> Cx<T> {
    let half = T::lit(0.5);
    let pref = cx(half, half) * cx(c.w_l(), -c.w_r());
    pref * unit_phase(-k) + c.v()
}

/// p₂ = v + ((1−i)/2)(w_l + i w_r) e^{−ik}
pub fn nssh1_p2<T: Real>(k: T, c: &CouplingSet<T>) -> Cx<T> {
    let half = T::lit(0.5);
    let pref = cx(half, -half) * cx(c.w_l(), c.w_r());
    pref * unit_phase(-k) + c.v()
}

/// [[0, p₁], [p₂*, 0]]
pub fn nssh1_k<T: Real>(k: T, c: &CouplingSet<T>) -> ComplexMatrix<T> {
    let z = cre(T::zero());
    ComplexMatrix::from_row_slice(2, 2, &[z, nssh1_p1(k, c), nssh1_p2(k, c).conj(), z])
        .with_label("(a_k, b_k)")
}

/// d̃ = (v + s cos k + i d cos k, s sin k + i d sin k), the vector that
/// reproduces `nssh1_k` as d̃·σ.
pub fn bloch_nssh1<T: Real>(k: T, c: &CouplingSet<T>) -> BlochVector<T> {
    let (s, d) = (c.hopping_mean(), c.pairing());
    let (sk, ck) = (unit_phase(k).im, unit_phase(k).re);
    BlochVector::new([c.v() + s * ck, s * sk], [d * ck, d * sk])
}

pub fn energy_nssh1<T: Real>(k: T, c: &CouplingSet<T>) -> Cx<T> {
    csqrt(nssh1_p1(k, c) * nssh1_p2(k, c).conj())
}

/// Hermitian 8×8 Bloch Hamiltonian of the bosonic chain in the Nambu basis.
pub fn hamiltonian_qb_k<T: Real>(k: T, c: &CouplingSet<T>, r: Regime) -> ComplexMatrix<T> {
    let (f1, f2) = coupling_functions(k, c);
    let z = cre(T::zero());
    let i = cx(T::zero(), T::one());
    let mut h = DMatrix::from_element(8, 8, z);
    let mut put = |a: usize, b: usize, val: Cx<T>| h[(a, b)] = val;
    match r {
        Regime::Real => {
            // P = [[0,f1,0,0],[f1*,0,0,0],[0,0,0,-f1],[0,0,-f1*,0]]
            // Q = [[0,0,0,-f2],[0,0,f2*,0],[0,f2,0,0],[-f2*,0,0,0]]
            for off in [0, 4] {
                put(off, off + 1, f1);
                put(off + 1, off, f1.conj());
                put(off + 2, off + 3, -f1);
                put(off + 3, off + 2, -f1.conj());
            }
            for (ro, co) in [(0, 4), (4, 0)] {
                put(ro, co + 3, -f2);
                put(ro + 1, co + 2, f2.conj());
                put(ro + 2, co + 1, f2);
                put(ro + 3, co, -f2.conj());
            }
        }
        Regime::Imaginary => {
            // P̃ = i·[[0,f1,0,0],[−f1*,0,0,0],[0,0,0,−f1],[0,0,f1*,0]]
            // Q̃ = i·[[0,0,0,f2],[0,0,f2*,0],[0,f2,0,0],[f2*,0,0,0]]
            // H = [[P̃, Q̃], [−Q̃, −P̃]]
            for (off, sg) in [(0usize, T::one()), (4, -T::one())] {
                put(off, off + 1, i * f1 * sg);
                put(off + 1, off, -i * f1.conj() * sg);
                put(off + 2, off + 3, -i * f1 * sg);
                put(off + 3, off + 2, i * f1.conj() * sg);
            }
            for (ro, co, sg) in [(0usize, 4usize, T::one()), (4, 0, -T::one())] {
                put(ro, co + 3, i * f2 * sg);
                put(ro + 1, co + 2, i * f2.conj() * sg);
                put(ro + 2, co + 1, i * f2 * sg);
                put(ro + 3, co, i * f2.conj() * sg);
            }
        }
    }
    ComplexMatrix::new(h, NAMBU_K_BASIS)
}

/// G(k) = τ₃ H(k) with τ₃ = σ₃ ⊗ I₄.
pub fn dynamical_qb_k<T: Real>(k: T, c: &CouplingSet<T>, r: Regime) -> ComplexMatrix<T> {
    let h = hamiltonian_qb_k(k, c, r);
    let tau3 = pauli::kron_all(&[pauli::sz(), pauli::s0(), pauli::s0()]);
    ComplexMatrix::new(tau3 * h.data(), NAMBU_K_BASIS)
}
