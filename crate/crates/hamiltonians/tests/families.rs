use hamiltonians::*;
use lattice_core::rational::rational_vector;
use lattice_core::{annihilator_lattice, Error, SubmoduleBasis};
use proptest::prelude::*;

fn fd_check(model: &HamiltonianModel, xi: &[f64]) -> (f64, f64) {
    let ev = model.evaluate(xi).unwrap();
    let d = xi.len();
    let s = 1e-5;
    let mut gerr = 0.0f64;
    let mut herr = 0.0f64;
    let gscale = 1.0 + ev.gradient.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let hscale = 1.0 + ev.hessian.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..d {
        let mut p = xi.to_vec();
        let mut m = xi.to_vec();
        p[i] += s;
        m[i] -= s;
        let g = (model.energy(&p) - model.energy(&m)) / (2.0 * s);
        gerr = gerr.max((g - ev.gradient[i]).abs() / gscale);
        let gp = model.evaluate(&p).unwrap().gradient;
        let gm = model.evaluate(&m).unwrap().gradient;
        for j in 0..d {
            let hij = (gp[j] - gm[j]) / (2.0 * s);
            herr = herr.max((hij - ev.hessian[(j, i)]).abs() / hscale);
        }
    }
    (gerr, herr)
}

#[test]
fn quadratic_identity_example() {
    let m = HamiltonianModel::half_laplacian(2);
    let ev = m.evaluate(&[1.0, 0.0]).unwrap();
    assert_eq!(ev.value, 0.5);
    assert_eq!(ev.gradient, vec![1.0, 0.0]);
    assert_eq!(ev.hessian, nalgebra::DMatrix::identity(2, 2));
}

#[test]
fn power_four_example() {
    let m = HamiltonianModel::Power { alpha: 4.0 };
    let ev = m.evaluate(&[1.0, 0.0]).unwrap();
    assert_eq!(ev.value, 1.0);
    assert_eq!(ev.gradient, vec![4.0, 0.0]);
    assert_eq!(ev.hessian, nalgebra::DMatrix::from_row_slice(2, 2, &[12.0, 0.0, 0.0, 4.0]));
}

#[test]
fn cubic_example_against_finite_differences() {
    let m = HamiltonianModel::Cubic3d;
    let ev = m.evaluate(&[0.0, 0.0, 1.0]).unwrap();
    assert_eq!(ev.value, -1.0);
    assert_eq!(ev.gradient, vec![0.0, 0.0, -3.0]);
    assert_eq!(
        ev.hessian,
        nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 2.0, -6.0]))
    );
    let (g, h) = fd_check(&m, &[0.0, 0.0, 1.0]);
    assert!(g < 1e-7 && h < 1e-7, "{g} {h}");
}

#[test]
fn non_even_power_is_singular_at_origin() {
    let m = HamiltonianModel::Power { alpha: 3.0 };
    assert!(matches!(m.evaluate(&[0.0, 1e-9]), Err(Error::SingularPoint(_))));
    assert!(m.evaluate(&[0.0, 1e-7]).is_ok());
    assert!(HamiltonianModel::Power { alpha: 4.0 }.evaluate(&[0.0, 0.0]).is_ok());
}

#[test]
fn classify_examples() {
    let q = HamiltonianModel::half_laplacian(2);
    assert_eq!(
        classify_point(&q, &[0.3, -1.0], 1e-10).unwrap(),
        PointClass { in_ch: false, isoenergetic_nondegenerate: true }
    );
    assert!(!classify_point(&q, &[0.0, 0.0], 1e-10).unwrap().isoenergetic_nondegenerate);
    assert!(classify_point(&HamiltonianModel::Saddle2d, &[0.4, 1.0], 1e-10).unwrap().in_ch);
    let p4 = HamiltonianModel::Power { alpha: 4.0 };
    assert!(classify_point(&p4, &[0.0, 0.0], 1e-10).unwrap().in_ch);
    assert!(!classify_point(&p4, &[1.0, 0.0], 1e-10).unwrap().in_ch);
}

#[test]
fn saddle_diagonal_is_isoenergetically_degenerate_at_origin_only() {
    let s = HamiltonianModel::Saddle2d;
    assert!(!classify_point(&s, &[0.0, 0.0], 1e-10).unwrap().isoenergetic_nondegenerate);
    // at (1,1): dH = (2,-2), η = (1,1) solves dH·η = 0 and d²Hη = (2,-2) = dH
    assert!(!classify_point(&s, &[1.0, 1.0], 1e-10).unwrap().isoenergetic_nondegenerate);
    assert!(classify_point(&s, &[1.0, 0.5], 1e-10).unwrap().isoenergetic_nondegenerate);
}

#[test]
fn assumption_a_examples() {
    let q = HamiltonianModel::half_laplacian(2);
    let l = SubmoduleBasis::from_i64(2, &[vec![0, 1]]).unwrap();
    assert!(check_assumption_a(&q, &[1.0, 0.0], &[(l, vec![0.0, 1.0])]).unwrap());
    assert!(check_assumption_a(&q, &[1.0, 0.0], &[]).unwrap());

    // saddle at (1,1): dH = (2,-2), so Λ₁ = span{(1,1)} and η₁ = (1,1)
    let s = HamiltonianModel::Saddle2d;
    let l1 = SubmoduleBasis::from_i64(2, &[vec![1, 1]]).unwrap();
    assert!(!check_assumption_a(&s, &[1.0, 1.0], &[(l1, vec![1.0, 1.0])]).unwrap());

    // span{(1,-1)} is not dH(ξ)^⊥ at (1,1)
    let wrong = SubmoduleBasis::from_i64(2, &[vec![1, -1]]).unwrap();
    let e = check_assumption_a(&s, &[1.0, 1.0], &[(wrong, vec![1.0, -1.0])]).unwrap_err();
    assert!(matches!(e, Error::PreconditionFailed(_)));
}

#[test]
fn assumption_a_two_step_chain_in_3d() {
    // H = ξ₁² + ξ₂² − ξ₃³ at ξ = (0,1,1): dH = (0,2,-3), d²H = diag(2,2,-6)
    let c = HamiltonianModel::Cubic3d;
    let xi = [0.0, 1.0, 1.0];
    let l1 = SubmoduleBasis::from_i64(3, &[vec![1, 0, 0], vec![0, 3, 2]]).unwrap();
    // η₁ = (0,3,2): d²Hη₁ = (0,6,-12), Λ₂ = {k ∈ Λ₁: 6k₂ − 12k₃ = 0} = span{(1,0,0)}
    let l2 = SubmoduleBasis::from_i64(3, &[vec![1, 0, 0]]).unwrap();
    // η₂ ⊥ (0,6,-12) and η₂·d²H(1,0,0) = 2η₂₁ ≠ 0
    let chain = vec![(l1, vec![0.0, 3.0, 2.0]), (l2, vec![1.0, 2.0, 1.0])];
    // d²Hη₂ = (2,4,-6), paired with (1,0,0) gives 2
    assert!(check_assumption_a(&c, &xi, &chain).unwrap());
}

#[test]
fn exact_gradient_feeds_annihilator() {
    let a = vec![rational_vector(&[(2, 1), (1, 1)]), rational_vector(&[(1, 1), (3, 1)])];
    let m = HamiltonianModel::Quadratic { a, theta: rational_vector(&[(0, 1), (0, 1)]) };
    let xi = rational_vector(&[(1, 1), (-1, 3)]);
    let g = m.gradient_exact(&xi).unwrap();
    // A ξ = (2 - 1/3, 1 - 1) = (5/3, 0)
    assert_eq!(g, rational_vector(&[(5, 3), (0, 1)]));
    let l = annihilator_lattice(&g);
    for k1 in -8i64..=8 {
        for k2 in -8i64..=8 {
            assert_eq!(l.contains_i64(&[k1, k2]), k1 == 0);
        }
    }
}

fn families() -> Vec<HamiltonianModel> {
    vec![
        HamiltonianModel::Quadratic {
            a: vec![rational_vector(&[(2, 1), (1, 2)]), rational_vector(&[(1, 2), (3, 1)])],
            theta: rational_vector(&[(1, 3), (-1, 2)]),
        },
        HamiltonianModel::Power { alpha: 4.0 },
        HamiltonianModel::Power { alpha: 3.0 },
        HamiltonianModel::Power { alpha: 6.0 },
        HamiltonianModel::Linear { omega: vec![1.0, 2f64.sqrt()] },
        HamiltonianModel::Saddle2d,
        HamiltonianModel::shifted(HamiltonianModel::Power { alpha: 4.0 }, 0.01, &[1.0, -2.0]),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn derivatives_match_finite_differences(x in prop::collection::vec(-2.0f64..2.0, 3)) {
        for m in families() {
            let xi = &x[..2];
            if xi.iter().map(|v| v * v).sum::<f64>() < 0.01 {
                continue;
            }
            let (g, h) = fd_check(&m, xi);
            prop_assert!(g < 1e-6 && h < 1e-6, "{m:?} at {xi:?}: {g} {h}");
        }
        let (g, h) = fd_check(&HamiltonianModel::Cubic3d, &x);
        prop_assert!(g < 1e-6 && h < 1e-6);
    }

    #[test]
    fn definite_quadratic_never_in_ch(x in prop::collection::vec(-5.0f64..5.0, 2)) {
        let m = &families()[0];
        prop_assert!(!classify_point(m, &x, 1e-10).unwrap().in_ch);
    }
}
