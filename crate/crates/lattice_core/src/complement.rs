use crate::error::{Error, Result};
use crate::hnf::{column_hnf, det, IntVector};
use crate::rational::RationalVector;
use crate::submodule::{saturate_in, FundamentalDomainSpec, SubmoduleBasis};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::f64::consts::PI;

/// Orthogonal complement, auxiliary lattice and fundamental domains of `Λ`.
#[derive(Debug, Clone, Serialize)]
pub struct ComplementData {
    pub lambda: SubmoduleBasis,
    /// Integer basis of `Λ^⊥ ∩ Z^d`, which spans `Λ^⊥` over the rationals.
    #[serde(skip)]
    pub orth_basis: Vec<RationalVector>,
    pub orth_lattice: SubmoduleBasis,
    /// `Λ̃ = 2π · aux_lattice`.
    pub aux_lattice: SubmoduleBasis,
    pub domain_lambda: FundamentalDomainSpec,
    pub domain_aux: FundamentalDomainSpec,
    /// `(L^T B)^{-1} L^T` with `B` the HNF basis of `Λ` and `L` the basis of `Λ̃/2π`.
    #[serde(skip)]
    proj: Vec<Vec<f64>>,
}

fn unit(d: usize, i: usize) -> IntVector {
    (0..d)
        .map(|j| if j == i { BigInt::one() } else { BigInt::zero() })
        .collect()
}

/// Subsets of `{0..d}` of size `r` in reverse lexicographic order.
fn subsets_rev_lex(d: usize, r: usize) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    for mask in 0u32..(1 << d) {
        if mask.count_ones() as usize == r {
            all.push((0..d).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>());
        }
    }
    all.sort_by(|a, b| b.cmp(a));
    all
}

fn choose_aux(lambda: &SubmoduleBasis, orth: &SubmoduleBasis) -> Vec<IntVector> {
    let d = lambda.dim();
    let r = lambda.rank();
    let k: Vec<IntVector> = orth.hnf().to_vec();
    for s in subsets_rev_lex(d, r) {
        let mut m = k.clone();
        m.extend(s.iter().map(|&i| unit(d, i)));
        if det(&m).abs().is_one() {
            return s.iter().map(|&i| unit(d, i)).collect();
        }
    }
    // unimodular completion of K: last r columns of (U^{-1})^T from K^T U = H
    let kt: Vec<IntVector> = (0..d)
        .map(|i| k.iter().map(|c| c[i].clone()).collect())
        .collect();
    let f = column_hnf(&kt, k.len());
    let u_inv_t = inverse_transpose_unimodular(&f.u);
    u_inv_t[d - r..].to_vec()
}

fn inverse_transpose_unimodular(u: &[IntVector]) -> Vec<IntVector> {
    // columns of (U^{-1})^T are the rows of U^{-1}; solve with rationals
    let n = u.len();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..n).map(|j| BigRational::from(u[j][i].clone())).collect();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero()).expect("unimodular");
        a.swap(c, p);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x = &*x / &piv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    // rows of U^{-1}
    (0..n)
        .map(|i| (0..n).map(|j| a[i][n + j].to_integer()).collect())
        .collect()
}

impl ComplementData {
    pub fn new(lambda: &SubmoduleBasis) -> Self {
        let orth = lambda.orthogonal_lattice();
        let aux_cols = choose_aux(lambda, &orth);
        Self::build(lambda, orth, &aux_cols).expect("auxiliary columns independent")
    }

    /// Same data with `Λ̃ = 2π · span_Z(aux_cols)`. The columns must complete an integer basis
    /// of `Λ^⊥ ∩ Z^d` to a basis of `Z^d`.
    pub fn with_aux(lambda: &SubmoduleBasis, aux_cols: &[Vec<i64>]) -> Result<Self> {
        let d = lambda.dim();
        let orth = lambda.orthogonal_lattice();
        if aux_cols.len() != lambda.rank() || aux_cols.iter().any(|c| c.len() != d) {
            return Err(Error::ShapeError(format!("need {} auxiliary columns of length {d}", lambda.rank())));
        }
        let aux: Vec<IntVector> = aux_cols.iter().map(|c| c.iter().map(|v| BigInt::from(*v)).collect()).collect();
        let mut m: Vec<IntVector> = orth.hnf().to_vec();
        m.extend(aux.iter().cloned());
        if !det(&m).abs().is_one() {
            return Err(Error::DegenerateInput("auxiliary columns do not complete Λ^⊥ ∩ Z^d to a basis".into()));
        }
        Self::build(lambda, orth, &aux)
    }

    fn build(lambda: &SubmoduleBasis, orth: SubmoduleBasis, aux_cols: &[IntVector]) -> Result<Self> {
        let d = lambda.dim();
        let aux = saturate_in(aux_cols, d)?;
        let orth_basis = orth
            .hnf()
            .iter()
            .map(|c| c.iter().map(|x| BigRational::from(x.clone())).collect())
            .collect();
        // (L^T B)^{-1} L^T
        let r = lambda.rank();
        let b = lambda.columns_f64();
        let l = aux.columns_f64();
        let mut m = vec![vec![0.0; r]; r];
        for i in 0..r {
            for j in 0..r {
                m[i][j] = l[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum();
            }
        }
        let minv = invert(m);
        let mut proj = vec![vec![0.0; d]; r];
        for i in 0..r {
            for k in 0..d {
                proj[i][k] = (0..r).map(|j| minv[i][j] * l[j][k]).sum();
            }
        }
        Ok(ComplementData {
            lambda: lambda.clone(),
            orth_basis,
            orth_lattice: orth.clone(),
            aux_lattice: aux.clone(),
            domain_lambda: FundamentalDomainSpec::unit_box(lambda.clone(), 1.0),
            domain_aux: FundamentalDomainSpec::unit_box(aux, 2.0 * PI),
            proj,
        })
    }

    /// Generators of `Λ̃` (already multiplied by `2π`).
    pub fn aux_generators(&self) -> Vec<Vec<f64>> {
        self.aux_lattice
            .columns_f64()
            .into_iter()
            .map(|c| c.into_iter().map(|v| 2.0 * PI * v).collect())
            .collect()
    }

    /// HNF coordinates of the `⟨Λ⟩` component of `ξ` in the splitting
    /// `R^d = Λ̃^⊥ ⊕ ⟨Λ⟩`.
    pub fn lambda_coords(&self, xi: &[f64]) -> Vec<f64> {
        self.proj
            .iter()
            .map(|row| row.iter().zip(xi).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// The `⟨Λ⟩` component `ξ_Λ`.
    pub fn lambda_component(&self, xi: &[f64]) -> Vec<f64> {
        self.lambda.combine(&self.lambda_coords(xi))
    }

    /// Bloch phase `{ξ_Λ / h}` as HNF coordinates in `[0,1)^rank`.
    pub fn bloch_phase_coords(&self, xi: &[f64], h: f64) -> Vec<f64> {
        self.lambda_coords(xi)
            .into_iter()
            .map(|c| {
                let v = c / h;
                let f = v - v.floor();
                if f >= 1.0 {
                    0.0
                } else {
                    f
                }
            })
            .collect()
    }

    /// Decomposes `x` over `Λ^⊥ ⊕ ⟨Λ̃⟩`: returns (coordinates on the
    /// orthogonal basis, coordinates on the generators of `Λ̃`, residual
    /// relative to the size of the terms `Σ |c_j| ‖g_j‖∞`).
    pub fn decompose(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let d = x.len();
        let mut cols: Vec<Vec<f64>> = self.orth_lattice.columns_f64();
        let no = cols.len();
        cols.extend(self.aux_generators());
        let mut a = vec![vec![0.0; d]; d];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..d {
                a[i][j] = c[i];
            }
        }
        let ainv = invert(a);
        let c: Vec<f64> = (0..d)
            .map(|i| (0..d).map(|j| ainv[i][j] * x[j]).sum())
            .collect();
        let mut back = vec![0.0; d];
        let mut size = 1.0f64;
        for (cj, col) in c.iter().zip(&cols) {
            for i in 0..d {
                back[i] += cj * col[i];
            }
            size += cj.abs() * col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        }
        let res = back
            .iter()
            .zip(x)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / size;
        (c[..no].to_vec(), c[no..].to_vec(), res)
    }
}

pub fn complement_data(lambda: &SubmoduleBasis) -> ComplementData {
    ComplementData::new(lambda)
}

fn invert(mut a: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        a.swap(c, p);
        inv.swap(c, p);
        let piv = a[c][c];
        for j in 0..n {
            a[c][j] /= piv;
            inv[c][j] /= piv;
        }
        for i in 0..n {
            if i != c {
                let f = a[i][c];
                if f != 0.0 {
                    for j in 0..n {
                        a[i][j] -= f * a[c][j];
                        inv[i][j] -= f * inv[c][j];
                    }
                }
            }
        }
    }
    inv
}
