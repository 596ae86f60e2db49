use lattice_core::rational::{int_rational_vector, rational_vector};
use lattice_core::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::f64::consts::PI;

fn span(d: usize, cols: &[&[i64]]) -> SubmoduleBasis {
    let cols: Vec<Vec<i64>> = cols.iter().map(|c| c.to_vec()).collect();
    SubmoduleBasis::from_i64(d, &cols).unwrap()
}

/// Brute-force membership in the rational span of `cols` intersected with Z^d.
fn in_rational_span(cols: &[Vec<i64>], k: &[i64]) -> bool {
    let d = k.len();
    let mut m: Vec<Vec<BigInt>> = cols.iter().map(|c| ivec(c)).collect();
    let r = lattice_core::hnf::rank(&m, d);
    m.push(ivec(k));
    lattice_core::hnf::rank(&m, d) == r
}

#[test]
fn saturate_axis_example() {
    let s = saturate(&[ivec(&[2, 0])]).unwrap();
    assert_eq!(s.columns(), &[vec![1, 0]]);
}

#[test]
fn saturate_primitive_is_identity() {
    let s = saturate(&[ivec(&[1, 0]), ivec(&[0, 1])]).unwrap();
    assert_eq!(s.columns(), &[vec![1, 0], vec![0, 1]]);
}

#[test]
fn saturate_full_rank_pair() {
    let s = saturate(&[ivec(&[2, 4]), ivec(&[6, 2])]).unwrap();
    assert_eq!(s.rank(), 2);
    let cols = vec![vec![2, 4], vec![6, 2]];
    for a in -3..=3 {
        for b in -3..=3 {
            let k = [a, b];
            assert_eq!(s.contains_i64(&k), in_rational_span(&cols, &k));
        }
    }
    assert_eq!(s.columns(), &[vec![1, 0], vec![0, 1]]);
}

#[test]
fn saturate_dependent_columns_rejected() {
    let e = saturate(&[ivec(&[1, 2]), ivec(&[2, 4])]).unwrap_err();
    assert!(matches!(e, Error::DegenerateInput(_)));
}

#[test]
fn annihilator_examples() {
    let a = annihilator_lattice(&int_rational_vector(&[1, 0]));
    assert_eq!(a.columns(), &[vec![0, 1]]);
    let a = annihilator_lattice(&rational_vector(&[(2, 3), (1, 1)]));
    assert_eq!(a.rank(), 1);
    // minimal generator found by brute force over ‖k‖∞ ≤ 10
    let mut best: Option<(i64, [i64; 2])> = None;
    for p in -10i64..=10 {
        for q in -10i64..=10 {
            if (p, q) != (0, 0) && 2 * p + 3 * q == 0 {
                let n = p.abs().max(q.abs());
                if best.map_or(true, |(m, _)| n < m) {
                    best = Some((n, [p, q]));
                }
            }
        }
    }
    let g = best.unwrap().1;
    assert!(a.contains_i64(&g));
    assert_eq!(a.columns()[0].iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![3, 2]);
    let z = annihilator_lattice(&int_rational_vector(&[0, 0]));
    assert!(z.is_full());
}

#[test]
fn resonance_examples() {
    let (l, j) =
        resonance_classify(&Gradient::Exact(int_rational_vector(&[1, 0])), ResonanceMode::Exact).unwrap();
    assert_eq!((l.columns().to_vec(), j), (vec![vec![0, 1]], 1));

    let g = Gradient::Float(vec![1.0, 2f64.sqrt()]);
    let (l, j) = resonance_classify(&g, ResonanceMode::Detect { qmax: 50, tol: 1e-9 }).unwrap();
    assert_eq!((l.rank(), j), (0, 2));
    // oracle: no integer relation within tolerance
    let mut closest = f64::INFINITY;
    for p in -50i64..=50 {
        for q in -50i64..=50 {
            if (p, q) != (0, 0) {
                closest = closest.min((p as f64 + q as f64 * 2f64.sqrt()).abs());
            }
        }
    }
    assert!(closest > 1e-9);

    let (l, j) =
        resonance_classify(&Gradient::Float(vec![0.0, 0.0]), ResonanceMode::Detect { qmax: 5, tol: 1e-9 })
            .unwrap();
    assert!(l.is_full() && j == 0);
}

#[test]
fn detect_mode_finds_rational_relation() {
    let g = Gradient::Float(vec![2.0 / 3.0, 1.0]);
    let (l, j) = resonance_classify(&g, ResonanceMode::Detect { qmax: 10, tol: 1e-9 }).unwrap();
    assert_eq!(j, 1);
    assert!(l.contains_i64(&[3, -2]));
}

#[test]
fn detect_mode_flags_loose_tolerance() {
    // (1,-1) and (2,-2) pass the tolerance but (3,-3) does not
    let g = Gradient::Float(vec![1.0, 1.004]);
    let e = resonance_classify(&g, ResonanceMode::Detect { qmax: 3, tol: 0.01 }).unwrap_err();
    assert!(matches!(e, Error::AmbiguousResonance(_)));
}

#[test]
fn complement_axis() {
    let c = complement_data(&span(2, &[&[0, 1]]));
    assert_eq!(c.orth_lattice.columns(), &[vec![1, 0]]);
    assert_eq!(c.aux_lattice.columns(), &[vec![0, 1]]);
    let g = c.aux_generators();
    assert!((g[0][1] - 2.0 * PI).abs() < 1e-15);
}

#[test]
fn complement_diagonal_direct_sum() {
    let c = complement_data(&span(2, &[&[1, -1]]));
    let o = c.orth_lattice.columns()[0].clone();
    assert!(o == vec![1, 1]);
    assert_eq!(c.aux_lattice.columns(), &[vec![0, 1]]);
    // every generator of 2πZ² decomposes over Λ^⊥ ⊕ ⟨Λ̃⟩
    for e in [[2.0 * PI, 0.0], [0.0, 2.0 * PI]] {
        let (_, _, res) = c.decompose(&e);
        assert!(res < 1e-12);
    }
}

#[test]
fn complement_full_lattice() {
    let c = complement_data(&SubmoduleBasis::full(2));
    assert_eq!(c.orth_lattice.rank(), 0);
    assert_eq!(c.aux_lattice.columns(), &[vec![1, 0], vec![0, 1]]);
}

#[test]
fn complement_of_tilted_lattice_keeps_integer_components() {
    // span{(2,3)}: ξ_Λ of an integer ξ must itself lie in Λ
    let lam = span(2, &[&[2, 3]]);
    let c = complement_data(&lam);
    for k in [[1.0, 0.0], [0.0, 1.0], [5.0, -7.0]] {
        let coords = c.lambda_coords(&k);
        for v in coords {
            assert!((v - v.round()).abs() < 1e-12, "{v}");
        }
    }
    for e in [[2.0 * PI, 0.0], [0.0, 2.0 * PI]] {
        assert!(c.decompose(&e).2 < 1e-12);
    }
}

#[test]
fn fractional_reduce_examples() {
    let l = span(2, &[&[0, 1]]);
    let r = fractional_reduce(&[0.0, 2.75], &l).unwrap();
    assert!((r[0]).abs() < 1e-15 && (r[1] - 0.75).abs() < 1e-15);
    let r = fractional_reduce(&[0.0, -0.25], &l).unwrap();
    assert!((r[1] - 0.75).abs() < 1e-15);
    let l = span(2, &[&[3, -2]]);
    let r = fractional_reduce(&[2.4 * 3.0, -2.4 * 2.0], &l).unwrap();
    assert!((r[0] - 1.2).abs() < 1e-12 && (r[1] + 0.8).abs() < 1e-12);
    let e = fractional_reduce(&[1.0, 1.0], &l).unwrap_err();
    assert!(matches!(e, Error::NotInSpan { .. }));
}

#[test]
fn coset_reduction_is_canonical() {
    let l = span(3, &[&[1, 2, 0], &[0, 3, 1]]);
    let k = [4, -7, 2];
    let r = l.reduce_i64(&k);
    let shifted: Vec<i64> = k.iter().zip([5, 1, -3]).map(|(a, b)| a + b).collect();
    // (5,1,-3) = 5(1,2,0) - 3(0,3,1)
    assert_eq!(l.reduce_i64(&shifted), r);
    let diff: Vec<i64> = k.iter().zip(&r).map(|(a, b)| a - b).collect();
    assert!(l.contains_i64(&diff));
}

#[test]
fn json_roundtrip() {
    let l = span(3, &[&[1, 2, 0], &[0, 3, 1]]);
    let s = serde_json::to_string(&l).unwrap();
    assert!(s.contains("\"rank\":2"));
    let back: SubmoduleBasis = serde_json::from_str(&s).unwrap();
    assert_eq!(back, l);
}

#[test]
fn rational_strings() {
    let v = rational_vector(&[(2, 3), (-1, 1)]);
    let s: Vec<String> = v.iter().map(lattice_core::rational::format_rational).collect();
    assert_eq!(s, vec!["2/3", "-1/1"]);
    let zero = BigRational::zero();
    assert_eq!(lattice_core::rational::format_rational(&zero), "0/1");
}
