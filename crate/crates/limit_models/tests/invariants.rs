use hamiltonians::HamiltonianModel;
use lattice_core::SubmoduleBasis;
use limit_models::*;
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use torus_quantization::{PotentialSpec, TorusSymbol};

fn symbol_from(coeffs: &[(i64, i64, f64, f64)]) -> TorusSymbol {
    let terms: Vec<(Vec<i64>, Complex64)> =
        coeffs.iter().map(|(a, b, re, im)| (vec![*a, *b], Complex64::new(*re, *im))).collect();
    TorusSymbol::trig(2, &terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn averaging_is_idempotent(
        coeffs in prop::collection::vec((-3i64..=3, -3i64..=3, -1.0f64..1.0, -1.0f64..1.0), 1..12),
        p in -2i64..=2, q in 1i64..=2,
    ) {
        let a = symbol_from(&coeffs);
        let l = SubmoduleBasis::from_i64(2, &[vec![p, q]]).unwrap();
        let once = averaged_symbol(&a, &l).unwrap();
        let twice = averaged_symbol(&once, &l).unwrap();
        prop_assert_eq!(once.modes(), twice.modes());
        for k in once.modes() {
            prop_assert!(l.contains_i64(k));
        }
        let x = [0.3, -1.2];
        let xi = [0.5, 0.1];
        prop_assert!((once.eval(&x, &xi) - twice.eval(&x, &xi)).norm() < 1e-14);
    }

    #[test]
    fn bloch_flow_is_unitary_and_keeps_trace(
        amps in prop::collection::vec(-1.0f64..1.0, 3),
        init in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
        t in 0.0f64..5.0,
        omega in -0.5f64..0.5,
    ) {
        let model = HamiltonianModel::half_laplacian(2);
        let l = SubmoduleBasis::from_i64(2, &[vec![0, 1]]).unwrap();
        let space = BlochSpace::new(&l, &[0.0, omega], 4).unwrap();
        let v_sym = TorusSymbol::cos_mode(&[0, 1], amps[0]).unwrap()
            .add(&TorusSymbol::cos_mode(&[0, 2], amps[1]).unwrap()).unwrap()
            .add(&TorusSymbol::cos_mode(&[0, 3], amps[2]).unwrap()).unwrap();
        let pot = PotentialSpec::multiplication(v_sym);
        let v = DVector::from_iterator(9, init.iter().map(|(a, b)| Complex64::new(*a, *b)));
        prop_assume!(v.norm() > 1e-3);
        let out = bloch_propagate(&space, &v, t, &model, &[1.0, 0.0], &pot).unwrap();
        prop_assert!((out.norm() - v.norm()).abs() < 1e-12);
        let m = BlochDensityOperator::pure(space.clone(), &v).unwrap();
        let ev = BlochEvolution::new(&space, &model, &[1.0, 0.0], &pot).unwrap();
        let mt = ev.conjugate(&m, t).unwrap();
        prop_assert!((mt.trace() - 1.0).norm() < 1e-12);
        let one = TorusSymbol::xi_only(2, |_| 1.0).unwrap();
        let p = heisenberg_trace_pairing(&m, t, &model, &[1.0, 0.0], &pot, &one).unwrap();
        prop_assert!((p - 1.0).abs() < 1e-12);
    }
}
