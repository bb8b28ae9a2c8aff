//! Residuals of the antiunitary and unitary symmetries of G(k).

use nalgebra::DMatrix;

use crate::matrix::max_abs_diff;
use crate::matrix::pauli::{kron_all, s0, sx, sy, sz};
use crate::scalar::{Cx, Real};

use super::{dynamical_qb_k, CouplingSet, Regime};

pub fn tau1<T: Real>() -> DMatrix<Cx<T>> {
    kron_all(&[sx(), s0(), s0()])
}

pub fn tau3<T: Real>() -> DMatrix<Cx<T>> {
    kron_all(&[sz(), s0(), s0()])
}

/// I₂ ⊗ σ₁ ⊗ I₂
pub fn tau1_tilde<T: Real>() -> DMatrix<Cx<T>> {
    kron_all(&[s0(), sx(), s0()])
}

/// σ_x ⊗ σ_y ⊗ σ_z
pub fn gamma<T: Real>() -> DMatrix<Cx<T>> {
    kron_all(&[sx(), sy(), sz()])
}

/// σ_z ⊗ σ_z ⊗ I₂
pub fn gamma_tilde<T: Real>() -> DMatrix<Cx<T>> {
    kron_all(&[sz(), sz(), s0()])
}

/// max |S G*(−k) S† + G(k)|
fn antiunitary_residual<T: Real>(s: &DMatrix<Cx<T>>, k: T, c: &CouplingSet<T>, r: Regime) -> T {
    let g = dynamical_qb_k(k, c, r);
    let gm = dynamical_qb_k(-k, c, r);
    let lhs = s * gm.data().map(|z| z.conj()) * s.adjoint();
    max_abs_diff(&lhs, &(-g.data()))
}

pub fn phs1_residual<T: Real>(k: T, c: &CouplingSet<T>, r: Regime) -> T {
    antiunitary_residual(&tau1(), k, c, r)
}

/// max |τ₃ G† τ₃ − G|
pub fn pseudo_hermiticity_residual<T: Real>(k: T, c: &CouplingSet<T>, r: Regime) -> T {
    let g = dynamical_qb_k(k, c, r);
    let t3 = tau3();
    max_abs_diff(&(&t3 * g.data().adjoint() * &t3), g.data())
}

pub fn phs2_residual<T: Real>(k: T, c: &CouplingSet<T>) -> T {
    antiunitary_residual(&tau1_tilde(), k, c, Regime::Real)
}

pub fn phs3_residual<T: Real>(k: T, c: &CouplingSet<T>) -> T {
    antiunitary_residual(&gamma(), k, c, Regime::Imaginary)
}

pub fn phs4_residual<T: Real>(k: T, c: &CouplingSet<T>) -> T {
    antiunitary_residual(&gamma_tilde(), k, c, Regime::Imaginary)
}

/// max |[U, G(k)]| with U = τ₁τ̃₁ (real regime) or Ũ = ΓΓ̃ (imaginary regime).
pub fn unitary_commutator_residual<T: Real>(k: T, c: &CouplingSet<T>, r: Regime) -> T {
    let u = match r {
        Regime::Real => tau1::<T>() * tau1_tilde::<T>(),
        Regime::Imaginary => gamma::<T>() * gamma_tilde::<T>(),
    };
    let g = dynamical_qb_k(k, c, r);
    max_abs_diff(&(&u * g.data()), &(g.data() * &u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn all_symmetries_hold(k in -3.2f64..3.2, d in -0.95f64..0.95, th in 0.0f64..1.0) {
            let c = CouplingSet::new(1.0, d, th).unwrap();
            for r in [Regime::Real, Regime::Imaginary] {
                prop_assert!(phs1_residual(k, &c, r) < 1e-12);
                prop_assert!(pseudo_hermiticity_residual(k, &c, r) < 1e-12);
                prop_assert!(unitary_commutator_residual(k, &c, r) < 1e-12);
            }
            prop_assert!(phs2_residual(k, &c) < 1e-12);
            prop_assert!(phs3_residual(k, &c) < 1e-12);
            prop_assert!(phs4_residual(k, &c) < 1e-12);
        }
    }

    #[test]
    fn phs2_is_specific_to_real_regime() {
        // the real-regime symmetry operator does not generically protect the
        // imaginary-regime matrix, which is why different operators appear there
        let c = CouplingSet::new(1.0, 0.3, 0.7).unwrap();
        let g = dynamical_qb_k(0.4, &c, Regime::Imaginary);
        let gm = dynamical_qb_k(-0.4, &c, Regime::Imaginary);
        let s = tau1_tilde::<f64>();
        let lhs = &s * gm.data().map(|z| z.conj()) * &s;
        assert!(max_abs_diff(&lhs, &(-g.data())) > 1e-3);
    }
}
