use proptest::prelude::*;

use qbh::amplification::{gain_metrics, nambu_to_quadrature, susceptibility, Direction, Sector};
use qbh::matrix::max_abs;
use qbh::model::{quadrature_dynamical, realspace_dynamical};
use qbh::scalar::cre;
use qbh::{Closure, CouplingSet64, Regime};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn quadratures_decouple_in_imaginary_regime(
        j in 0.5f64..2.0,
        d in -0.95f64..0.95,
        th in 0.0f64..1.0,
        n in 2usize..6,
    ) {
        let c = CouplingSet64::new(j, d, th).unwrap();
        let g = realspace_dynamical(&c, n, Regime::Imaginary, Closure::Open).unwrap();
        let m = nambu_to_quadrature(&g).unwrap();
        let h = 4 * n;
        let data = m.data();
        prop_assert!(max_abs(&data.view((0, h), (h, h)).into_owned()) < 1e-12);
        prop_assert!(max_abs(&data.view((h, 0), (h, h)).into_owned()) < 1e-12);
        let q = quadrature_dynamical(&c, n, Closure::Open).unwrap();
        prop_assert!(max_abs(&(data.view((0, 0), (h, h)).into_owned() - q.h_x.map(cre))) < 1e-12);
        prop_assert!(max_abs(&(data.view((h, h), (h, h)).into_owned() - q.h_p.map(cre))) < 1e-12);
    }
}

#[test]
fn sectors_amplify_in_opposite_directions() {
    for &(d, th) in &[(0.2, 0.0), (0.5, 0.4), (0.1, 0.4), (0.7, 1.0), (0.4, 0.8)] {
        let rep = susceptibility(&CouplingSet64::new(1.0, d, th).unwrap(), 10).unwrap();
        for p in gain_metrics(&rep) {
            let want = match p.sector {
                Sector::Ac => Direction::Leftward,
                Sector::Bd => Direction::Rightward,
            };
            assert_eq!(p.direction, want, "delta={d} theta={th} {p:?}");
        }
    }
}
