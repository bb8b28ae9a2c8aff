//! Two independent constructions of the Loschmidt amplitude used to cross
//! check the closed form: the normal-mode coefficient assembly and a direct
//! biorthogonal evolution of the 2×2 Bloch Hamiltonian.

use nalgebra::DMatrix;

use crate::model::{hamiltonian_nssh2_k, CouplingSet};
use crate::scalar::{cexp, cre, csqrt, imag_unit, modulus, unit_phase, Cx, Real};
use crate::spectral::eig_general;

use super::QuenchError;

/// F₁,₂ = (1 ± √r)/2 and Q₁,₂ = (1 ± 1/√r)/2 at one momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeCoefficients<T: Real> {
    /// r = f₁ᶠ f₂ⁱ* / (f₂ᶠ* f₁ⁱ) with f₁ = v + w_r e^{−ik}, f₂ = v + w_l e^{−ik}
    pub r: Cx<T>,
    pub sqrt_r: Cx<T>,
    pub f1: Cx<T>,
    pub f2: Cx<T>,
    pub q1: Cx<T>,
    pub q2: Cx<T>,
    pub energy_final: Cx<T>,
}

impl<T: Real> ModeCoefficients<T> {
    /// (Q₂² − Q₁²)(F₂² − F₁²), identically one.
    pub fn normalization(&self) -> Cx<T> {
        (self.q2 * self.q2 - self.q1 * self.q1) * (self.f2 * self.f2 - self.f1 * self.f1)
    }
}

/// The root of r is fixed by √r = αᶠEⁱ/(αⁱEᶠ) with α = v + w_r e^{−ik} and
/// principal energies, which is the branch that maps the initial ground
/// state onto the final normal modes with the same energy labels.
pub fn mode_coefficients<T: Real>(
    k: T,
    ci: &CouplingSet<T>,
    cf: &CouplingSet<T>,
) -> Result<ModeCoefficients<T>, QuenchError> {
    let e = unit_phase(-k);
    let pair = |c: &CouplingSet<T>| (e * c.w_r() + c.v(), e * c.w_l() + c.v());
    let (f1i, f2i) = pair(ci);
    let (f1f, f2f) = pair(cf);
    // E² = (v + w_r e^{−ik})(v + w_l e^{ik}) = f₁ f₂*
    let ei = csqrt(f1i * f2i.conj());
    let ef = csqrt(f1f * f2f.conj());
    let tiny = T::lit(1e-14);
    for (val, z) in [(f1i, ei), (f1f, ef)] {
        if modulus(val) < tiny || modulus(z) < tiny {
            return Err(QuenchError::Oracle(format!("defective block at k = {}", k.to_f64_lossy())));
        }
    }
    let r = f1f * f2i.conj() / (f2f.conj() * f1i);
    let sqrt_r = f1f * ei / (f1i * ef);
    let half = T::lit(0.5);
    let one = cre(T::one());
    let inv = one / sqrt_r;
    Ok(ModeCoefficients {
        r,
        sqrt_r,
        f1: (one + sqrt_r) * half,
        f2: (one - sqrt_r) * half,
        q1: (one + inv) * half,
        q2: (one - inv) * half,
        energy_final: ef,
    })
}

/// (Q₂F₂e^{−iEᶠt} + Q₁F₁e^{iEᶠt}) / ((Q₂²−Q₁²)(F₂²−F₁²))
pub fn loschmidt_oracle<T: Real>(k: T, ci: &CouplingSet<T>, cf: &CouplingSet<T>, t: T) -> Result<Cx<T>, QuenchError> {
    let m = mode_coefficients(k, ci, cf)?;
    let phase = imag_unit::<T>() * m.energy_final * t;
    Ok((m.q2 * m.f2 * cexp(-phase) + m.q1 * m.f1 * cexp(phase)) / m.normalization())
}

/// ⟨L₋ⁱ| e^{−iHᶠt} |R₋ⁱ⟩ for the biorthonormal eigenpair of Hⁱ at −Eⁱ, with
/// the propagator built from the numerical eigendecomposition of Hᶠ.
pub fn loschmidt_biorthogonal<T: Real>(
    k: T,
    ci: &CouplingSet<T>,
    cf: &CouplingSet<T>,
    t: T,
) -> Result<Cx<T>, QuenchError> {
    let hi = hamiltonian_nssh2_k(k, ci).into_inner();
    let hf = hamiltonian_nssh2_k(k, cf).into_inner();
    let si = eig_general(&hi)?;
    let sf = eig_general(&hf)?;
    if si.is_defective() || sf.is_defective() {
        return Err(QuenchError::Oracle(format!("defective 2x2 block at k = {}", k.to_f64_lossy())));
    }
    let target = -csqrt(hi[(0, 1)] * hi[(1, 0)]);
    let idx = (0..2)
        .min_by(|&a, &b| {
            modulus(si.values[a] - target).partial_cmp(&modulus(si.values[b] - target)).unwrap()
        })
        .unwrap();
    let right = si.right.column(idx).into_owned();
    let left = si.left.row(idx).into_owned();

    let phases = DMatrix::from_fn(2, 2, |a, b| {
        if a == b { cexp(-imag_unit::<T>() * sf.values[a] * t) } else { cre(T::zero()) }
    });
    let propagator = &sf.right * phases * &sf.left;
    Ok((left * propagator * right)[(0, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quench::loschmidt_gk;
    use std::f64::consts::PI;

    fn cs(d: f64, th: f64) -> CouplingSet<f64> {
        CouplingSet::new(1.0, d, th).unwrap()
    }

    #[test]
    fn reference_point_agrees() {
        let (ci, cf) = (cs(-0.9, 0.0), cs(0.9, 0.4));
        let k = PI / 3.0;
        let g = loschmidt_gk(k, &ci, &cf, 1.0).unwrap();
        let a = loschmidt_oracle(k, &ci, &cf, 1.0).unwrap();
        let b = loschmidt_biorthogonal(k, &ci, &cf, 1.0).unwrap();
        assert!((g - a).norm() < 1e-9, "{g} vs {a}");
        assert!((g - b).norm() < 1e-9, "{g} vs {b}");
    }

    #[test]
    fn chosen_root_squares_to_r() {
        for j in 0..50 {
            let k = -3.1 + 0.124 * j as f64;
            let m = mode_coefficients(k, &cs(-0.4, 0.2), &cs(0.7, 0.9)).unwrap();
            assert!((m.sqrt_r * m.sqrt_r - m.r).norm() < 1e-12 * (1.0 + m.r.norm()));
            assert!((m.normalization() - cre(1.0)).norm() < 1e-12);
        }
    }
}
