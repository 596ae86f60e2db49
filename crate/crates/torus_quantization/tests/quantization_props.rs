use hamiltonians::HamiltonianModel;
use num_complex::Complex64;
use proptest::prelude::*;
use torus_quantization::*;

fn state_strategy() -> impl Strategy<Value = FourierState> {
    (1usize..=2, 1usize..=4, -3i64..=3).prop_flat_map(|(d, n, c0)| {
        let g = FourierGrid::centered(vec![c0; d], n, 0.1).unwrap();
        let len = g.len();
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(move |v| {
            let coeffs = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            FourierState::from_coeffs(g.clone(), coeffs).unwrap()
        })
    })
}

fn pair_strategy() -> impl Strategy<Value = (FourierState, FourierState)> {
    state_strategy().prop_flat_map(|u| {
        let g = u.grid.clone();
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), g.len()).prop_map(move |w| {
            let coeffs = w.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            (u.clone(), FourierState::from_coeffs(g.clone(), coeffs).unwrap())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn free_propagation_is_unitary(u in state_strategy(), t in -50.0f64..50.0) {
        let model = if u.dim() == 2 { HamiltonianModel::Saddle2d } else { HamiltonianModel::Power { alpha: 4.0 } };
        let v = free_propagate(&u, t, &model);
        prop_assert!((v.norm_sqr() - u.norm_sqr()).abs() < 1e-12 * u.norm_sqr().max(1.0));
        for (a, b) in u.coeffs.iter().zip(&v.coeffs) {
            prop_assert!((a.norm() - b.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn line_autocorrelation_matches_direct_sum(u in state_strategy(), n1 in -2i64..=2, n2 in -2i64..=2) {
        let n: Vec<i64> = if u.dim() == 1 { vec![1] } else { vec![n1, if n1 == 0 && n2 == 0 { 1 } else { n2 }] };
        let corr = line_autocorrelation(&u, &n);
        let g = &u.grid;
        for (q, cq) in corr.iter().enumerate() {
            let mut direct = Complex64::new(0.0, 0.0);
            for j in 0..g.len() {
                let k = g.mode(j);
                let kq: Vec<i64> = k.iter().zip(&n).map(|(a, b)| a + q as i64 * b).collect();
                direct += u.coeffs[j].conj() * u.get(&kq);
            }
            prop_assert!((direct - cq).norm() < 1e-12);
        }
    }

    #[test]
    fn real_symbol_forms_are_hermitian((u, v) in pair_strategy(), amp in -3.0f64..3.0) {
        let d = u.dim();
        let mut m = vec![0; d];
        m[0] = 1;
        let a = TorusSymbol::cos_mode(&m, amp)
            .unwrap()
            .times_xi(|xi| Complex64::new((-xi[0] * xi[0]).exp(), 0.0));
        let uv = weyl_form(&u, &a, &v).unwrap();
        let vu = weyl_form(&v, &a, &u).unwrap();
        prop_assert!((uv - vu.conj()).norm() < 1e-12);
    }

    #[test]
    fn density_mass_equals_norm(u in state_strategy(), extra in 0usize..5) {
        let dens = position_density(&u, u.grid.side() + extra).unwrap();
        prop_assert!((dens.mass() - u.norm_sqr()).abs() < 1e-10 * u.norm_sqr().max(1.0));
    }
}
