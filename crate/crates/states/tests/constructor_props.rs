use proptest::prelude::*;
use states::*;

fn coherent_params() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64, u32)> {
    (1usize..=3).prop_flat_map(|d| {
        (
            prop::collection::vec(-4.0..4.0f64, d),
            prop::collection::vec(-1.5..1.5f64, d),
            0.3..0.7f64,
            4u32..=6,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coherent_states_have_unit_norm_and_concentrate((x0, xi0, beta, p) in coherent_params()) {
        let h = 2f64.powi(-(p as i32));
        let eps = h.powf(beta);
        let g = coherent_grid(&xi0, eps, h, &ProfileSpec::Gaussian).unwrap();
        let b = coherent_state(&x0, &xi0, eps, &ProfileSpec::Gaussian, &g).unwrap();
        prop_assert!((b.state.norm() - 1.0).abs() < 1e-10);
        prop_assert!(b.state.momentum_tail(&xi0, 10.0 * h / eps) < 1e-8);
    }

    #[test]
    fn recipes_resolve_to_unit_norm(which in 0usize..5, p in 4u32..=6) {
        let h = 2f64.powi(-(p as i32));
        let recipe = match which {
            0 => StateRecipe::LagrangianDiag { profile: ProfileSpec::Gaussian },
            1 => StateRecipe::Example3 { alpha: 0.5, eps: PowerLaw::new(1.0, 0.5), profile: ProfileSpec::Gaussian },
            2 => StateRecipe::Wunsch { eps: 0.5 },
            3 => StateRecipe::PowerQuasimode { xi0: vec![0.0, 0.0], eps: PowerLaw::new(10.0, 0.625) },
            _ => StateRecipe::Modulated {
                x0: vec![1.0], xi0: vec![1.0], eta0: vec![0.5], eps: PowerLaw::new(1.0, 0.5),
                tau: PowerLaw::new(1.0, -0.5), profile: ProfileSpec::CompactBump { radius: 1.0 },
            },
        };
        let model = hamiltonians::HamiltonianModel::half_laplacian(recipe.dim());
        let b = recipe.resolve(h, &model).unwrap();
        prop_assert!((b.state.norm() - 1.0).abs() < 1e-10);
        prop_assert_eq!(b.state.dim(), recipe.dim());
    }

    #[test]
    fn oscillation_tails_are_monotone(x in -2.0..2.0f64, rs in prop::collection::vec(0.0..4.0f64, 1..8)) {
        let recipe = StateRecipe::Coherent {
            x0: vec![x], xi0: vec![1.0], eps: PowerLaw::new(1.0, 0.5), profile: ProfileSpec::Gaussian,
        };
        let model = hamiltonians::HamiltonianModel::half_laplacian(1);
        let mut rs = rs;
        rs.sort_by(f64::total_cmp);
        let rows = oscillation_profile(&recipe, &model, &[1.0 / 16.0], &rs).unwrap();
        prop_assert!(rows.windows(2).all(|w| w[1].tail <= w[0].tail + 1e-15));
    }
}
