use crate::error::{Error, Result};
use crate::hnf::{rank, IntVector};
use crate::rational::{from_f64_exact, RationalVector};
use crate::submodule::{annihilator_lattice, saturate_in, SubmoduleBasis};
use num_bigint::BigInt;

#[derive(Debug, Clone)]
pub enum Gradient {
    Exact(RationalVector),
    Float(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResonanceMode {
    Exact,
    Detect { qmax: i64, tol: f64 },
}

/// Resonance lattice of a gradient and its order `j = d - rank`.
pub fn resonance_classify(g: &Gradient, mode: ResonanceMode) -> Result<(SubmoduleBasis, usize)> {
    let lambda = match (g, mode) {
        (Gradient::Exact(v), _) => annihilator_lattice(v),
        (Gradient::Float(v), ResonanceMode::Exact) => annihilator_lattice(&from_f64_exact(v)?),
        (Gradient::Float(v), ResonanceMode::Detect { qmax, tol }) => detect_relations(v, qmax, tol)?.0,
    };
    let order = lambda.dim() - lambda.rank();
    Ok((lambda, order))
}

/// Odometer over the half box `{k : ‖k‖∞ ≤ q, first nonzero entry > 0}`.
fn for_each_half_box(d: usize, q: i64, mut f: impl FnMut(&[i64]) -> Result<()>) -> Result<()> {
    let mut k = vec![-q; d];
    loop {
        if let Some(first) = k.iter().find(|x| **x != 0) {
            if *first > 0 {
                f(&k)?;
            }
        }
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if k[i] < q {
                k[i] += 1;
                break;
            }
            k[i] = -q;
        }
    }
}

/// Integer relations `|k·v| < tol`, `‖k‖∞ ≤ qmax`, saturated; the second
/// value is the number of accepted box points.
pub fn detect_relations(v: &[f64], qmax: i64, tol: f64) -> Result<(SubmoduleBasis, usize)> {
    let d = v.len();
    if qmax < 1 || !(tol > 0.0) {
        return Err(Error::PreconditionFailed(format!(
            "detect mode needs qmax >= 1 and tol > 0 (got {qmax}, {tol})"
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateInput("non-finite gradient".into()));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < tol {
        return Ok((SubmoduleBasis::full(d), 0));
    }
    let dot = |k: &[i64]| k.iter().zip(v).map(|(a, b)| *a as f64 * b).sum::<f64>();
    let mut indep: Vec<IntVector> = Vec::new();
    let mut accepted = 0usize;
    for_each_half_box(d, qmax, |k| {
        if dot(k).abs() < tol {
            accepted += 1;
            if indep.len() + 1 < d {
                let mut trial = indep.clone();
                trial.push(k.iter().map(|&x| BigInt::from(x)).collect());
                if rank(&trial, d) == trial.len() {
                    indep = trial;
                }
            } else if indep.len() + 1 == d {
                let mut trial = indep.clone();
                trial.push(k.iter().map(|&x| BigInt::from(x)).collect());
                if rank(&trial, d) == trial.len() {
                    return Err(Error::AmbiguousResonance(format!(
                        "{d} independent relations accepted for a nonzero gradient; tolerance too loose"
                    )));
                }
            }
        }
        Ok(())
    })?;
    let lambda = saturate_in(&indep, d)?;
    for_each_half_box(d, qmax, |k| {
        let acc = dot(k).abs() < tol;
        if acc != lambda.contains_i64(k) {
            return Err(Error::AmbiguousResonance(format!(
                "relation {k:?} (|k·v| = {:.3e}) inconsistent with the accepted lattice",
                dot(k).abs()
            )));
        }
        Ok(())
    })?;
    Ok((lambda, accepted))
}
