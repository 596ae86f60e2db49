use crate::error::{Error, Result};
use crate::hnf::{column_hnf, integer_kernel, IntVector};
use crate::rational::RationalVector;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub const MAX_DIM: usize = 4;

/// A primitive submodule of the integer lattice, stored in column HNF.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmoduleBasis {
    dim: usize,
    hnf: Vec<IntVector>,
    pivots: Vec<usize>,
    small: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct SubmoduleJson {
    dim: usize,
    rank: usize,
    hnf: Vec<Vec<i64>>,
}

impl Serialize for SubmoduleBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubmoduleJson {
            dim: self.dim,
            rank: self.rank(),
            hnf: self.small.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubmoduleBasis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SubmoduleJson::deserialize(d)?;
        if j.hnf.len() != j.rank {
            return Err(serde::de::Error::custom("rank does not match hnf column count"));
        }
        let cols: Vec<IntVector> = j
            .hnf
            .iter()
            .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        saturate_in(&cols, j.dim).map_err(serde::de::Error::custom)
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::DegenerateInput(format!(
            "ambient dimension {d} outside 1..={MAX_DIM}"
        )));
    }
    Ok(())
}

fn unit(d: usize, i: usize) -> IntVector {
    (0..d)
        .map(|j| if j == i { BigInt::one() } else { BigInt::zero() })
        .collect()
}

impl SubmoduleBasis {
    /// Builds from columns that already span a primitive module; the HNF is recomputed.
    fn from_primitive(cols: &[IntVector], d: usize) -> Result<Self> {
        let f = column_hnf(cols, d);
        let hnf: Vec<IntVector> = f.h[..f.rank].to_vec();
        let small = hnf
            .iter()
            .map(|c| {
                c.iter()
                    .map(|x| {
                        x.to_i64()
                            .ok_or_else(|| Error::Overflow(format!("HNF entry {x} exceeds i64")))
                    })
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubmoduleBasis {
            dim: d,
            hnf,
            pivots: f.pivots,
            small,
        })
    }

    pub fn zero(d: usize) -> Self {
        SubmoduleBasis {
            dim: d,
            hnf: vec![],
            pivots: vec![],
            small: vec![],
        }
    }

    pub fn full(d: usize) -> Self {
        let cols: Vec<IntVector> = (0..d).map(|i| unit(d, i)).collect();
        Self::from_primitive(&cols, d).expect("identity fits")
    }

    /// Convenience constructor from small integer generators (saturated).
    pub fn from_i64(d: usize, cols: &[Vec<i64>]) -> Result<Self> {
        let cols: Vec<IntVector> = cols
            .iter()
            .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        saturate_in(&cols, d)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.hnf.len()
    }

    pub fn hnf(&self) -> &[IntVector] {
        &self.hnf
    }

    /// HNF columns as machine integers.
    pub fn columns(&self) -> &[Vec<i64>] {
        &self.small
    }

    pub fn columns_f64(&self) -> Vec<Vec<f64>> {
        self.small
            .iter()
            .map(|c| c.iter().map(|&x| x as f64).collect())
            .collect()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim
    }

    /// Exact integer coordinates of `k` in the HNF basis, if `k` lies in the module.
    pub fn coords_i64(&self, k: &[i64]) -> Option<Vec<i64>> {
        debug_assert_eq!(k.len(), self.dim);
        let mut rest: Vec<i128> = k.iter().map(|&x| x as i128).collect();
        let mut out = Vec::with_capacity(self.rank());
        for (j, &p) in self.pivots.iter().enumerate() {
            let col = &self.small[j];
            let piv = col[p] as i128;
            if rest[p] % piv != 0 {
                return None;
            }
            let q = rest[p] / piv;
            for i in p..self.dim {
                rest[i] -= q * col[i] as i128;
            }
            out.push(q as i64);
        }
        if rest.iter().all(|&x| x == 0) {
            Some(out)
        } else {
            None
        }
    }

    pub fn contains_i64(&self, k: &[i64]) -> bool {
        self.coords_i64(k).is_some()
    }

    pub fn contains(&self, k: &[BigInt]) -> bool {
        let mut rest: Vec<BigInt> = k.to_vec();
        for (j, &p) in self.pivots.iter().enumerate() {
            let col = &self.hnf[j];
            let (q, r) = rest[p].div_rem(&col[p]);
            if !r.is_zero() {
                return false;
            }
            for i in p..self.dim {
                let t = &q * &col[i];
                rest[i] -= t;
            }
        }
        rest.iter().all(|x| x.is_zero())
    }

    /// Canonical representative of the coset `k + Λ`.
    pub fn reduce_i64(&self, k: &[i64]) -> Vec<i64> {
        let mut out = k.to_vec();
        for (j, &p) in self.pivots.iter().enumerate() {
            let col = &self.small[j];
            let q = out[p].div_euclid(col[p]);
            if q != 0 {
                for i in p..self.dim {
                    out[i] -= q * col[i];
                }
            }
        }
        out
    }

    /// Real coordinates of a point of the rational span in the HNF basis.
    pub fn coords(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::ShapeError(format!(
                "vector of length {} for dimension {}",
                x.len(),
                self.dim
            )));
        }
        let mut rest = x.to_vec();
        let mut out = Vec::with_capacity(self.rank());
        for (j, &p) in self.pivots.iter().enumerate() {
            let col = &self.small[j];
            let q = rest[p] / col[p] as f64;
            for i in p..self.dim {
                rest[i] -= q * col[i] as f64;
            }
            out.push(q);
        }
        let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let residual = rest.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual > 1e-12 * scale {
            return Err(Error::NotInSpan { residual });
        }
        Ok(out)
    }

    pub fn combine(&self, coords: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (c, col) in coords.iter().zip(&self.small) {
            for i in 0..self.dim {
                out[i] += c * col[i] as f64;
            }
        }
        out
    }

    /// True when every generator of `self` lies in `other`.
    pub fn is_submodule_of(&self, other: &SubmoduleBasis) -> bool {
        self.dim == other.dim && self.small.iter().all(|c| other.contains_i64(c))
    }

    /// Integer basis of the orthogonal lattice `Λ^⊥ ∩ Z^d`.
    pub fn orthogonal_lattice(&self) -> SubmoduleBasis {
        let k = integer_kernel(&self.hnf, self.dim);
        Self::from_primitive(&k, self.dim).expect("kernel of small lattice fits")
    }

    /// Integer vectors of `Λ` orthogonal to a real direction `w`, found by
    /// relation detection on the pairings of the generators with `w`.
    pub fn restrict_orthogonal(&self, w: &[f64], qmax: i64, tol: f64) -> Result<SubmoduleBasis> {
        let g: Vec<f64> = self
            .small
            .iter()
            .map(|c| c.iter().zip(w).map(|(a, b)| *a as f64 * b).sum())
            .collect();
        if g.is_empty() {
            return Ok(SubmoduleBasis::zero(self.dim));
        }
        let (sub, _) = crate::resonance::detect_relations(&g, qmax, tol)?;
        let cols: Vec<IntVector> = sub
            .columns()
            .iter()
            .map(|c| {
                let mut v = vec![BigInt::zero(); self.dim];
                for (cj, col) in c.iter().zip(&self.hnf) {
                    for i in 0..self.dim {
                        v[i] += BigInt::from(*cj) * &col[i];
                    }
                }
                v
            })
            .collect();
        saturate_in(&cols, self.dim)
    }
}

/// Saturation of the span of `cols` inside `Z^d`.
pub fn saturate_in(cols: &[IntVector], d: usize) -> Result<SubmoduleBasis> {
    check_dim(d)?;
    for c in cols {
        if c.len() != d {
            return Err(Error::ShapeError(format!(
                "column of length {} for dimension {d}",
                c.len()
            )));
        }
    }
    if cols.is_empty() {
        return Ok(SubmoduleBasis::zero(d));
    }
    let f = column_hnf(cols, d);
    if f.rank < cols.len() {
        return Err(Error::DegenerateInput(format!(
            "{} columns span a rank {} module",
            cols.len(),
            f.rank
        )));
    }
    let k = integer_kernel(cols, d);
    let s = integer_kernel(&k, d);
    SubmoduleBasis::from_primitive(&s, d)
}

/// Saturates the integer span of `columns`; dimension is the column length.
pub fn saturate(columns: &[IntVector]) -> Result<SubmoduleBasis> {
    let Some(first) = columns.first() else {
        return Err(Error::DegenerateInput(
            "empty column list has no ambient dimension; use saturate_in".into(),
        ));
    };
    saturate_in(columns, first.len())
}

/// All integer `k` with `k . v = 0` exactly.
pub fn annihilator_lattice(v: &RationalVector) -> SubmoduleBasis {
    let d = v.len();
    let mut l = BigInt::one();
    for q in v {
        l = l.lcm(q.denom());
    }
    let row: IntVector = v.iter().map(|q| (q * &l).to_integer()).collect();
    let rows = if row.iter().all(|x| x.is_zero()) {
        vec![]
    } else {
        vec![row]
    };
    let k = integer_kernel(&rows, d);
    SubmoduleBasis::from_primitive(&k, d).expect("annihilator fits")
}

/// Half-open fundamental domain `[0,1)^rank` in HNF coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundamentalDomainSpec {
    pub lattice: SubmoduleBasis,
    /// Scale applied to the lattice generators (1 for `Λ`, `2π` for `Λ̃`).
    pub scale: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl FundamentalDomainSpec {
    pub fn unit_box(lattice: SubmoduleBasis, scale: f64) -> Self {
        let r = lattice.rank();
        FundamentalDomainSpec {
            lattice,
            scale,
            lower: vec![0.0; r],
            upper: vec![1.0; r],
        }
    }

    /// Coordinates of a point of the span, relative to the scaled generators.
    pub fn coords(&self, x: &[f64]) -> Result<Vec<f64>> {
        let xs: Vec<f64> = x.iter().map(|v| v / self.scale).collect();
        self.lattice.coords(&xs)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self.coords(x) {
            Ok(c) => c
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (a, b))| *v >= *a && *v < *b),
            Err(_) => false,
        }
    }

    /// Lebesgue measure of the box in the span.
    pub fn volume(&self) -> f64 {
        let g: Vec<Vec<f64>> = self
            .lattice
            .columns_f64()
            .into_iter()
            .map(|c| c.into_iter().map(|v| v * self.scale).collect())
            .collect();
        let r = g.len();
        let mut gram = vec![vec![0.0; r]; r];
        for i in 0..r {
            for j in 0..r {
                gram[i][j] = g[i].iter().zip(&g[j]).map(|(a, b)| a * b).sum();
            }
        }
        det_f64(gram).abs().sqrt()
    }
}

fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// Reduces a point of `⟨Λ⟩` into the half-open HNF box.
pub fn fractional_reduce(eta: &[f64], lambda: &SubmoduleBasis) -> Result<Vec<f64>> {
    let c = lambda.coords(eta)?;
    let frac: Vec<f64> = c
        .iter()
        .map(|v| {
            let f = v - v.floor();
            if f >= 1.0 {
                0.0
            } else {
                f
            }
        })
        .collect();
    Ok(lambda.combine(&frac))
}

