use hamiltonians::HamiltonianModel;
use lattice_core::SubmoduleBasis;
use num_complex::Complex64;
use proptest::prelude::*;
use torus_quantization::{FourierGrid, FourierState};
use wigner_measures::*;

fn state(grid: &FourierGrid, raw: &[(f64, f64)]) -> FourierState {
    let coeffs = (0..grid.len()).map(|i| Complex64::new(raw[i % raw.len()].0, raw[i % raw.len()].1)).collect();
    let mut u = FourierState::from_coeffs(grid.clone(), coeffs).unwrap();
    u.normalize().unwrap();
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quartic_chart_split(dx in -0.24f64..0.24, dy in -0.24f64..0.24, t in -0.1f64..0.1) {
        prop_assume!(dx.hypot(dy) < 0.24 && dx.hypot(dy + t) < 0.24);
        let l = SubmoduleBasis::from_i64(2, &[vec![0, 1]]).unwrap();
        let model = HamiltonianModel::Power { alpha: 4.0 };
        let chart = ChartF::new(&model, &[1.0, 0.0], &l, 0.5).unwrap();
        let xi = [1.0 + dx, dy];
        let (s, e) = chart.decompose(&xi).unwrap();
        prop_assert!((s[0] + e[0] - xi[0]).abs() < 1e-12 && (s[1] + e[1] - xi[1]).abs() < 1e-12);
        prop_assert!(model.gradient(&s).unwrap()[1].abs() < 1e-10);
        let (s2, e2) = chart.decompose(&[xi[0], xi[1] + t]).unwrap();
        prop_assert!((s2[1] - s[1]).abs() < 1e-12);
        prop_assert!((e2[1] - e[1] - t).abs() < 1e-12);
    }

    #[test]
    fn cutoff_parts_partition(
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 7..20),
        tau in 0.5f64..40.0,
        r in 0.5f64..8.0,
        delta in 0.01f64..1.0,
    ) {
        prop_assume!(raw.iter().any(|p| p.0 != 0.0 || p.1 != 0.0));
        let h = 1.0 / 16.0;
        let l = SubmoduleBasis::from_i64(2, &[vec![1, 1]]).unwrap();
        let chart = ChartF::new(&HamiltonianModel::half_laplacian(2), &[0.5, -0.5], &l, 1.0).unwrap();
        let a = TwoMicroSymbol::separable(
            &l,
            &[(vec![0, 0], Complex64::new(1.0, 0.0)), (vec![1, 1], Complex64::new(0.0, 0.4))],
            |xi| 1.0 / (1.0 + xi[0] * xi[0]),
            |eta| (1.0 + eta[0] * eta[0]).sqrt().recip() * eta[0],
            |w| w[0].signum(),
            1e9,
            &[0.5, -0.5],
            0.45,
        ).unwrap();
        let u = state(&FourierGrid::centered(vec![8, -8], 5, h).unwrap(), &raw);
        let (c, s, o) = two_micro_pairing(&u, &a, &chart, tau, r, delta).unwrap();
        let full = full_pairing(&u, &a, &chart, tau).unwrap();
        prop_assert!((c + s + o - full).abs() < 1e-10);
    }

    #[test]
    fn kh_mass_is_windowed_mass(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5..30)) {
        prop_assume!(raw.iter().any(|p| p.0 != 0.0 || p.1 != 0.0));
        let h = 1.0 / 16.0;
        let l = SubmoduleBasis::from_i64(2, &[vec![1, 1]]).unwrap();
        let chart = ChartF::new(&HamiltonianModel::half_laplacian(2), &[0.5, -0.5], &l, 0.5).unwrap();
        let m = MWindow::for_chart(&chart);
        let u = state(&FourierGrid::centered(vec![8, -8], 5, h).unwrap(), &raw);
        let field = kh_transform(&u, &chart, &m).unwrap();
        let windowed = field.to_state(&u.grid).unwrap();
        let lhs: f64 = windowed.coeffs.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((field.plancherel_mass() - lhs).abs() < 1e-10 * lhs.max(1e-300));
        prop_assert!(field.bloch_defect().unwrap() < 1e-8);
    }
}
