use hamiltonians::HamiltonianModel;
use lattice_core::{Error, ResonanceMode, SubmoduleBasis};
use limit_models::*;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;
use torus_quantization::{
    perturbed_propagate, wigner_pairing, FourierGrid, FourierState, PotentialSpec, TimeWindow, TorusSymbol,
};
use wigner_measures::{kh_transform, ChartF, MWindow, TwoMicroSymbol};

fn lam(d: usize, cols: &[Vec<i64>]) -> SubmoduleBasis {
    SubmoduleBasis::from_i64(d, cols).unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn box_symbol(d: usize, r: i64) -> TorusSymbol {
    let mut terms = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            let k = if d == 2 { vec![a, b] } else { unreachable!() };
            terms.push((k, Complex64::new(1.0 + a as f64 * 0.1, b as f64 * 0.05)));
        }
    }
    TorusSymbol::trig(d, &terms).unwrap()
}

#[test]
fn averaged_symbol_examples() {
    let a = TorusSymbol::cos_mode(&[1, 0], 1.0).unwrap().add(&TorusSymbol::cos_mode(&[0, 1], 1.0).unwrap()).unwrap();
    let avg = averaged_symbol(&a, &lam(2, &[vec![0, 1]])).unwrap();
    let mut modes = avg.modes().to_vec();
    modes.sort();
    assert_eq!(modes, vec![vec![0, -1], vec![0, 1]]);
    for x in [[0.3, 1.1], [2.0, -0.4]] {
        assert!((avg.eval(&x, &[0.0, 0.0]).re - x[1].cos()).abs() < 1e-15);
    }

    let b = box_symbol(2, 3);
    let zero = averaged_symbol(&b, &SubmoduleBasis::zero(2)).unwrap();
    assert_eq!(zero.modes(), &[vec![0, 0]]);

    let anti = averaged_symbol(&b, &lam(2, &[vec![1, -1]])).unwrap();
    let mut kept = anti.modes().to_vec();
    kept.sort();
    let expected: Vec<Vec<i64>> = (-3..=3).map(|j| vec![j, -j]).collect();
    assert_eq!(kept, expected);
    assert!(anti.records().is_some());

    let twice = averaged_symbol(&anti, &lam(2, &[vec![1, -1]])).unwrap();
    assert_eq!(twice.modes(), anti.modes());
    let full = averaged_symbol(&b, &SubmoduleBasis::full(2)).unwrap();
    assert_eq!(full.modes(), b.modes());
}

#[test]
fn averaging_is_exact_on_single_cosets() {
    let h = 1.0 / 8.0;
    let l = lam(2, &[vec![1, 1]]);
    let grid = FourierGrid::centered(vec![8, 0], 6, h).unwrap();
    let mut u = FourierState::zeros(grid.clone());
    for j in -4..=4i64 {
        let k = [8 + j, 1 + j];
        u.coeffs[grid.index(&k).unwrap()] = Complex64::new(1.0 / (1.0 + j.abs() as f64), 0.3 * j as f64);
    }
    u.normalize().unwrap();
    let a = box_symbol(2, 3).times_xi(|xi| c((-(xi[0] - 1.0).powi(2)).exp()));
    let avg = averaged_symbol(&a, &l).unwrap();
    let full = wigner_pairing(&u, &a).unwrap();
    let part = wigner_pairing(&u, &avg).unwrap();
    assert!((full - part).abs() < 1e-14, "{full} {part}");
}

#[test]
fn orbit_measure_examples() {
    let model = HamiltonianModel::half_laplacian(2);
    let detect = ResonanceMode::Detect { qmax: 50, tol: 1e-9 };
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let spec = OrbitMeasureSpec::new(&model, &[0.4, 1.0], &[1.0, golden], detect).unwrap();
    assert_eq!(spec.lambda0.rank(), 0);
    let a = box_symbol(2, 2).times_xi(|xi| c(xi[0] * xi[0]));
    let mean = orbit_measure_pairing(&spec, &a).unwrap();
    assert!((mean - 1.0).abs() < 1e-15);

    let g = |xi: &[f64]| c((-(xi[0] - 1.0).powi(2) - xi[1] * xi[1]).exp() * 0.7);
    let a = TorusSymbol::cos_mode(&[0, 1], 1.0).unwrap().times_xi(g);
    let on = OrbitMeasureSpec::new(&model, &[0.0, 0.0], &[1.0, 0.0], detect).unwrap();
    assert_eq!(on.lambda0, lam(2, &[vec![0, 1]]));
    assert!((orbit_measure_pairing(&on, &a).unwrap() - 0.7).abs() < 1e-15);
    let off = OrbitMeasureSpec::new(&model, &[0.0, PI / 2.0], &[1.0, 0.0], detect).unwrap();
    assert!(orbit_measure_pairing(&off, &a).unwrap().abs() < 1e-15);

    // x0 ↦ x0 + v with v ⟂ Λ0
    let b = box_symbol(2, 3);
    let p0 = orbit_measure_pairing_complex(&on, &b).unwrap();
    for v in [0.3, 2.0, -5.0] {
        let moved = OrbitMeasureSpec::with_lattice(&[v, 0.0], &[1.0, 0.0], on.lambda0.clone()).unwrap();
        assert!((orbit_measure_pairing_complex(&moved, &b).unwrap() - p0).norm() < 1e-13);
    }
}

#[test]
fn free_bloch_flow_is_a_phase() {
    let model = HamiltonianModel::half_laplacian(2);
    let l = lam(2, &[vec![0, 1]]);
    let omega = [0.0, 0.25];
    let space = BlochSpace::new(&l, &omega, 4).unwrap();
    assert_eq!(space.len(), 9);
    let i = space.index_of(&[0, 2]).unwrap();
    let mut v = DVector::from_element(space.len(), c(0.0));
    v[i] = c(1.0);
    let t = 0.7;
    let out = bloch_propagate(&space, &v, t, &model, &[1.0, 0.0], &PotentialSpec::Zero).unwrap();
    let e = 0.5 * (2.0 - 0.25f64).powi(2);
    assert!((out[i] - Complex64::from_polar(1.0, -t * e)).norm() < 1e-15);
    assert!(out.iter().enumerate().all(|(j, z)| j == i || *z == c(0.0)));
    assert!(matches!(
        bloch_propagate(&space, &v, t, &model, &[1.0, 0.1], &PotentialSpec::Zero),
        Err(Error::PreconditionFailed(_))
    ));
}

#[test]
fn cosine_potential_matches_its_taylor_expansion() {
    let model = HamiltonianModel::half_laplacian(2);
    let l = lam(2, &[vec![0, 1]]);
    let space = BlochSpace::new(&l, &[0.0, 0.0], 1).unwrap();
    let v_sym = TorusSymbol::cos_mode(&[0, 1], 1.0).unwrap();
    let pot = PotentialSpec::multiplication(v_sym);
    let ev = BlochEvolution::new(&space, &model, &[1.0, 0.0], &pot).unwrap();
    let g = ev.generator().clone();
    for i in 0..3 {
        for j in 0..3 {
            let expect = if i == j {
                0.5 * space.effective_mode(i)[1].powi(2)
            } else if (i as i64 - j as i64).abs() == 1 {
                0.5
            } else {
                0.0
            };
            assert_eq!(g[(i, j)], c(expect));
        }
    }
    let v0 = DVector::from_vec(vec![c(0.2), c(0.9), Complex64::new(0.1, 0.3)]);
    for t in [1e-2, 5e-3, 2.5e-3] {
        let exact = ev.propagate(&v0, t).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let series = &v0 - &g * &v0 * (i * t) - &g * &g * &v0 * c(0.5 * t * t);
        let err = (&exact - &series).norm();
        assert!(err < 0.2 * t.powi(3), "t = {t}: {err}");
    }
    let too_wide = TorusSymbol::cos_mode(&[0, 2], 1.0).unwrap();
    assert!(matches!(
        BlochEvolution::new(&space, &model, &[1.0, 0.0], &PotentialSpec::multiplication(too_wide)),
        Err(Error::TruncationError { required_radius: 2 })
    ));
}

#[test]
fn full_lattice_reduces_to_the_unit_torus_equation() {
    // H = |ξ|², σ = 0: the generator is |λ|² + V
    let model = HamiltonianModel::quadratic_identity(2, 2);
    let space = BlochSpace::new(&SubmoduleBasis::full(2), &[0.0, 0.0], 6).unwrap();
    let v_sym = TorusSymbol::cos_mode(&[1, 0], 0.3).unwrap().add(&TorusSymbol::cos_mode(&[1, 1], 0.2).unwrap()).unwrap();
    let pot = PotentialSpec::multiplication(v_sym);
    let grid = FourierGrid::new(2, 6, 1.0).unwrap();
    let mut u = FourierState::zeros(grid.clone());
    for (k, a) in [([0, 0], 0.8), ([1, -1], 0.5), ([0, 1], 0.3)] {
        u.coeffs[grid.index(&k).unwrap()] = c(a);
    }
    u.normalize().unwrap();
    let mut v = DVector::from_element(space.len(), c(0.0));
    for i in 0..grid.len() {
        v[space.index_of(&grid.mode(i)).unwrap()] = u.coeffs[i];
    }
    let t = 1.0;
    let limit = bloch_propagate(&space, &v, t, &model, &[0.0, 0.0], &pot).unwrap();
    let torus = perturbed_propagate(&u, t, &model, &pot, 1e-4).unwrap();
    let mut err = 0.0f64;
    for i in 0..grid.len() {
        err = err.max((limit[space.index_of(&grid.mode(i)).unwrap()] - torus.coeffs[i]).norm());
    }
    assert!(err < 1e-8, "{err}");
}

#[test]
fn heisenberg_examples() {
    let model = HamiltonianModel::half_laplacian(2);
    let l = lam(2, &[vec![0, 1]]);
    let sigma = [1.0, 0.0];
    let omega = [0.0, 0.5];
    let space = BlochSpace::new(&l, &omega, 3).unwrap();

    let mut e1 = DVector::from_element(space.len(), c(0.0));
    e1[space.index_of(&[0, 1]).unwrap()] = c(1.0);
    let m0 = BlochDensityOperator::pure(space.clone(), &e1).unwrap();
    let a0 = TorusSymbol::xi_only(2, |xi| 2.0 + xi[0]).unwrap();
    let pot = PotentialSpec::multiplication(TorusSymbol::cos_mode(&[0, 1], 0.4).unwrap());
    for t in [0.0, 0.5, 3.0] {
        let p = heisenberg_trace_pairing(&m0, t, &model, &sigma, &pot, &a0).unwrap();
        assert!((p - 3.0).abs() < 1e-12);
    }

    let (l1, l2) = ([0i64, 2], [0i64, -1]);
    let mut v = DVector::from_element(space.len(), c(0.0));
    v[space.index_of(&l1).unwrap()] = c(1.0);
    v[space.index_of(&l2).unwrap()] = c(1.0);
    let m = BlochDensityOperator::pure(space.clone(), &v).unwrap();
    let a = TorusSymbol::plane(&[0, 3]).unwrap();
    let freq = 0.5 * ((2.0 - 0.5f64).powi(2) - (-1.0 - 0.5f64).powi(2));
    for t in [0.0, 0.3, 1.7] {
        let p = heisenberg_trace_pairing_complex(&m, t, &model, &sigma, &PotentialSpec::Zero, &a).unwrap();
        assert!((p - Complex64::from_polar(0.5, t * freq)).norm() < 1e-14, "{p}");
    }

    let diag = BlochDensityOperator::new(
        space.clone(),
        DMatrix::from_fn(space.len(), space.len(), |i, j| if i == j { c(1.0 / space.len() as f64) } else { c(0.0) }),
    )
    .unwrap();
    let b = TorusSymbol::cos_mode(&[0, 1], 1.0).unwrap().add(&TorusSymbol::plane(&[0, 2]).unwrap()).unwrap();
    let p0 = heisenberg_trace_pairing_complex(&diag, 0.0, &model, &sigma, &PotentialSpec::Zero, &b).unwrap();
    for t in [0.4, 2.0, 9.0] {
        let p = heisenberg_trace_pairing_complex(&diag, t, &model, &sigma, &PotentialSpec::Zero, &b).unwrap();
        assert!((p - p0).norm() < 1e-14);
    }
}

#[test]
fn heisenberg_flow_keeps_the_spectrum() {
    let model = HamiltonianModel::half_laplacian(2);
    let l = lam(2, &[vec![0, 1]]);
    let space = BlochSpace::new(&l, &[0.0, 0.3], 8).unwrap();
    let n = space.len();
    let raw = DMatrix::from_fn(n, 3, |i, j| Complex64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64));
    let mut rho = &raw * raw.adjoint();
    let tr = rho.trace();
    rho /= tr;
    let m0 = BlochDensityOperator::new(space.clone(), rho).unwrap();
    let pot = PotentialSpec::multiplication(
        TorusSymbol::cos_mode(&[0, 1], 0.8).unwrap().add(&TorusSymbol::cos_mode(&[0, 2], 0.3).unwrap()).unwrap(),
    );
    let ev = BlochEvolution::new(&space, &model, &[1.0, 0.0], &pot).unwrap();
    let spec0 = m0.eigenvalues();
    let u = ev.unitary(10.0);
    let defect = (&u * u.adjoint() - DMatrix::<Complex64>::identity(n, n)).iter().fold(0.0f64, |m, v| m.max(v.norm()));
    assert!(defect < 1e-12);
    for t in [0.5, 2.5, 10.0] {
        let mt = ev.conjugate(&m0, t).unwrap();
        mt.validate().unwrap();
        let drift = mt.eigenvalues().iter().zip(&spec0).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(drift < 1e-10);
        // group law
        let split = ev.conjugate(&ev.conjugate(&m0, t / 2.0).unwrap(), t / 2.0).unwrap();
        assert!((&split.matrix - &mt.matrix).iter().all(|v| v.norm() < 1e-12));
    }
}

#[test]
fn density_operator_json_and_checks() {
    let l = lam(2, &[vec![1, 1]]);
    let space = BlochSpace::new(&l, &[0.25, 0.25], 2).unwrap();
    let v = DVector::from_fn(space.len(), |i, _| Complex64::new(i as f64, 1.0 - i as f64 * 0.5));
    let m = BlochDensityOperator::pure(space.clone(), &v).unwrap();
    let json = serde_json::to_value(&m).unwrap();
    assert_eq!(json["window_radius"], 2);
    assert_eq!(json["matrix"].as_array().unwrap().len(), 25);
    let back: BlochDensityOperator = serde_json::from_value(json).unwrap();
    assert_eq!(back, m);

    let bad = DMatrix::from_fn(5, 5, |i, j| if i == j { c(if i == 0 { 1.5 } else { -0.125 }) } else { c(0.0) });
    assert!(matches!(BlochDensityOperator::new(space.clone(), bad), Err(Error::PreconditionFailed(_))));
    assert!(BlochSpace::new(&l, &[0.25, 0.0], 2).is_err());
}

#[test]
fn classical_flow_examples() {
    let model = HamiltonianModel::half_laplacian(2);
    let a = TorusSymbol::trig(2, &[(vec![1, 2], c(1.0))]).unwrap().times_xi(|xi| c(1.0 + xi[1] * xi[1]));
    let xi = [0.7, -0.4];
    let same = flow_pullback(&a, &model, 0.0).unwrap();
    assert_eq!(same.coeff(0, &xi), a.coeff(0, &xi));
    let s = 1.3;
    let moved = flow_pullback(&a, &model, s).unwrap();
    let expect = a.coeff(0, &xi) * Complex64::from_polar(1.0, s * (0.7 - 0.8));
    assert!((moved.coeff(0, &xi) - expect).norm() < 1e-15);

    // rational dH(ξ) = (1, 1/2): averaging over a period 4π keeps k with k·dH = 0
    let panel: Vec<Vec<i64>> = vec![vec![0, 0], vec![1, -2], vec![1, 0], vec![0, 1], vec![2, -1]];
    let b = TorusSymbol::trig(2, &panel.iter().map(|k| (k.clone(), c(1.0))).collect::<Vec<_>>()).unwrap();
    let xi = [1.0, 0.5];
    let w = TimeWindow::new(0.0, 4.0 * PI, 4096).unwrap();
    for (i, k) in panel.iter().enumerate() {
        let p = k[0] as f64 * xi[0] + k[1] as f64 * xi[1];
        let mut acc = c(0.0);
        for (t, wt) in w.times().iter().zip(w.weights()) {
            acc += flow_pullback(&b, &model, *t).unwrap().coeff(i, &xi) * wt;
        }
        if p == 0.0 {
            assert!((acc - c(1.0)).norm() < 1e-12);
        } else {
            assert!(acc.norm() < 1e-6, "{k:?}: {acc}");
        }
    }
}

#[test]
fn two_micro_flows() {
    let model = HamiltonianModel::Power { alpha: 4.0 };
    let l = lam(2, &[vec![0, 1]]);
    let chart = ChartF::new(&model, &[1.0, 0.0], &l, 0.5).unwrap();
    let a = TwoMicroSymbol::separable(&l, &[(vec![0, 1], c(1.0))], |_| 1.0, |_| 1.0, |_| 1.0, 1.0, &[1.0, 0.0], 0.2)
        .unwrap();
    let xi = [1.1, 0.05];
    let eta = [0.0, -3.0];
    let sigma = chart.sigma(&xi).unwrap();
    let hess = model.hessian(&sigma).unwrap();
    let p1 = two_micro_flow_pullback(&a, &chart, Flow::Phi1 { s: 0.4 }).unwrap();
    let expect = Complex64::from_polar(1.0, 0.4 * hess[(1, 1)] * -1.0);
    assert!((p1.core(0, &xi, &eta) - expect).norm() < 1e-12);
    assert!((p1.hom(0, &xi, &[0.0, -1.0]) - expect).norm() < 1e-12);
    let pt = two_micro_flow_pullback(&a, &chart, Flow::Phi1Tilde { t: 0.4 }).unwrap();
    let expect = Complex64::from_polar(1.0, 0.4 * hess[(1, 1)] * -3.0);
    assert!((pt.core(0, &xi, &eta) - expect).norm() < 1e-12);
    let p0 = two_micro_flow_pullback(&a, &chart, Flow::Phi0 { s: 0.4 }).unwrap();
    let g = model.gradient(&xi).unwrap();
    assert!((p0.core(0, &xi, &eta) - Complex64::from_polar(1.0, 0.4 * g[1])).norm() < 1e-12);
    let zero = two_micro_flow_pullback(&a, &chart, Flow::Phi1 { s: 0.0 }).unwrap();
    assert_eq!(zero.core(0, &xi, &eta), a.core(0, &xi, &eta));
    let wide = TwoMicroSymbol::separable(&l, &[(vec![0, 1], c(1.0))], |_| 1.0, |_| 1.0, |_| 1.0, 1.0, &[1.0, 0.0], 0.3)
        .unwrap();
    assert!(matches!(two_micro_flow_pullback(&wide, &chart, Flow::Phi1 { s: 1.0 }), Err(Error::OutOfChart { .. })));
}

#[test]
fn atoms_from_kh_fibers() {
    let h = 1.0 / 16.0;
    let model = HamiltonianModel::half_laplacian(2);
    let l = lam(2, &[vec![0, 1]]);
    let chart = ChartF::new(&model, &[1.0, 0.0], &l, 0.5).unwrap();
    let m = MWindow::for_chart(&chart);
    let grid = FourierGrid::centered(vec![16, 0], 3, h).unwrap();
    let mut u = FourierState::zeros(grid.clone());
    for (k, a) in [([16, 0], 0.9), ([16, 1], 0.3), ([16, -2], 0.2), ([17, 0], 0.1)] {
        u.coeffs[grid.index(&k).unwrap()] = c(a);
    }
    u.normalize().unwrap();
    let field = kh_transform(&u, &chart, &m).unwrap();
    let atoms = extract_atoms(&field, 4).unwrap();
    assert_eq!(atoms.len(), 2);
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    assert!((total - field.plancherel_mass()).abs() < 1e-14);
    let dom = dominant_atom(&field, 4).unwrap();
    assert_eq!(dom.sigma, vec![1.0, 0.0]);
    assert_eq!(dom.omega, vec![0.0, 0.0]);
    let i = dom.m0.space.index_of(&[0, 1]).unwrap();
    let j = dom.m0.space.index_of(&[0, -2]).unwrap();
    let expect = 0.3 * 0.2 / (0.81 + 0.09 + 0.04);
    assert!((dom.m0.matrix[(i, j)].re - expect).abs() < 1e-14);
    assert_eq!(dom.dropped, 0.0);
    let heavy = field.fibers.iter().max_by(|a, b| a.mass().total_cmp(&b.mass())).unwrap();
    let narrow = fiber_atom(heavy, &field, 1).unwrap();
    assert!((narrow.dropped - 0.04 / 0.95).abs() < 1e-14, "{}", narrow.dropped);

    let mut even = FourierState::zeros(grid.clone());
    even.coeffs[grid.index(&[16, 0]).unwrap()] = c(1.0);
    even.coeffs[grid.index(&[15, 0]).unwrap()] = c(1.0);
    even.normalize().unwrap();
    let f = kh_transform(&even, &chart, &m).unwrap();
    assert!(matches!(dominant_atom(&f, 4), Err(Error::AmbiguousExtraction { .. })));
}

fn limit_prediction(u: &FourierState, chart: &ChartF, a: &TwoMicroSymbol, pot: &PotentialSpec, t: f64) -> (f64, f64) {
    let field = kh_transform(u, chart, &MWindow::for_chart(chart)).unwrap();
    let mut total = Complex64::new(0.0, 0.0);
    for atom in extract_atoms(&field, 3).unwrap() {
        let ev = BlochEvolution::new(&atom.m0.space, chart.model(), &atom.sigma, pot).unwrap();
        let b = atom.m0.space.two_micro_matrix(a, &atom.sigma, Some(1.0)).unwrap();
        total += ev.conjugate(&atom.m0, t).unwrap().pair(&b).unwrap() * atom.weight;
    }
    (field.plancherel_mass(), total.re)
}

#[test]
fn limit_prediction_does_not_depend_on_the_auxiliary_lattice() {
    let h = 1.0 / 32.0;
    let model = HamiltonianModel::half_laplacian(2);
    let l = lam(2, &[vec![0, 1]]);
    let xi0 = [1.03, 0.0];
    let base = ChartF::new(&model, &xi0, &l, 0.5).unwrap();
    let tilted = base.clone().with_complement(lattice_core::ComplementData::with_aux(&l, &[vec![1, 1]]).unwrap()).unwrap();
    let steep = base.clone().with_complement(lattice_core::ComplementData::with_aux(&l, &[vec![3, 1]]).unwrap()).unwrap();
    assert_ne!(base.bloch_phase(&xi0, h), tilted.bloch_phase(&xi0, h));

    let grid = FourierGrid::centered(vec![33, 0], 6, h).unwrap();
    let mut u = FourierState::zeros(grid.clone());
    for i in 0..grid.len() {
        let k = grid.mode(i);
        let z = [(k[0] as f64 - xi0[0] / h) / 1.5, k[1] as f64 / 1.5];
        u.coeffs[i] = Complex64::from_polar((-(z[0] * z[0] + z[1] * z[1]) / 2.0).exp(), 0.4 * k[1] as f64);
    }
    u.normalize().unwrap();

    let a = TwoMicroSymbol::separable(
        &l,
        &[(vec![0, 1], c(0.5)), (vec![0, -1], c(0.5))],
        |xi: &[f64]| (-((xi[0] - 1.03).powi(2) + xi[1] * xi[1]) / 2.0).exp(),
        |eta: &[f64]| (-eta.iter().map(|v| v * v).sum::<f64>() / 32.0).exp(),
        |_| 0.0,
        48.0,
        &xi0,
        0.5,
    )
    .unwrap();
    let cos = PotentialSpec::multiplication(TorusSymbol::cos_mode(&[0, 1], 1.0).unwrap());
    for pot in [PotentialSpec::Zero, cos] {
        for t in [0.0, 0.3, 1.0] {
            let (m0, p0) = limit_prediction(&u, &base, &a, &pot, t);
            assert!(p0.abs() > 1e-3, "t = {t}: {p0}");
            for chart in [&tilted, &steep] {
                let (m1, p1) = limit_prediction(&u, chart, &a, &pot, t);
                assert!((m0 - m1).abs() < 1e-13);
                assert!((p0 - p1).abs() < 1e-10 * p0.abs().max(1.0), "t = {t}: {p0} vs {p1}");
            }
        }
    }
    assert!(lattice_core::ComplementData::with_aux(&l, &[vec![1, 2]]).is_err());
}
