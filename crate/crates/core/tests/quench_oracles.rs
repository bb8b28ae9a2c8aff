use proptest::prelude::*;

use qbh::quench::oracle::{loschmidt_biorthogonal, loschmidt_oracle, mode_coefficients};
use qbh::quench::{loschmidt_gk, quench_mode};
use qbh::scalar::modulus;
use qbh::CouplingSet64;

fn couplings() -> impl Strategy<Value = CouplingSet64> {
    (0.5f64..2.0, -0.95f64..0.95, 0.0f64..1.0).prop_map(|(j, d, th)| CouplingSet64::new(j, d, th).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_matches_both_oracles(
        k in -std::f64::consts::PI..std::f64::consts::PI,
        ci in couplings(),
        cf in couplings(),
        t in 0.0f64..6.0,
    ) {
        let m = quench_mode(k, &ci, &cf).unwrap();
        // stay away from EPs, where the biorthogonal basis degenerates
        prop_assume!(modulus(m.energy_initial) > 0.05 && modulus(m.energy_final) > 0.05);
        let g = loschmidt_gk(k, &ci, &cf, t).unwrap();
        let a = loschmidt_oracle(k, &ci, &cf, t).unwrap();
        let b = loschmidt_biorthogonal(k, &ci, &cf, t).unwrap();
        let scale = 1.0 + g.norm();
        prop_assert!((g - a).norm() < 1e-9 * scale, "closed {g} vs mode assembly {a}");
        prop_assert!((g - b).norm() < 1e-9 * scale, "closed {g} vs evolution {b}");
    }

    #[test]
    fn mode_coefficient_normalization_is_one(
        k in -std::f64::consts::PI..std::f64::consts::PI,
        ci in couplings(),
        cf in couplings(),
    ) {
        let m = mode_coefficients(k, &ci, &cf).unwrap();
        prop_assert!((m.normalization() - num_complex::Complex::new(1.0, 0.0)).norm() < 1e-12);
    }
}
