//! Column Hermite normal form over the integers.
//!
//! Matrices are stored as a list of columns. The reduced form has its
//! nonzero columns first; the pivot of a column is its first nonzero row,
//! pivot rows strictly increase, pivots are positive and the entries to
//! the left of a pivot (same row, earlier columns) lie in `[0, pivot)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntVector = Vec<BigInt>;

#[derive(Debug, Clone)]
pub struct ColumnHnf {
    /// Reduced columns; the first `rank` are nonzero.
    pub h: Vec<IntVector>,
    /// Unimodular transform with `a * u = h` (columns of length `n`).
    pub u: Vec<IntVector>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

fn axpy(dst: &mut [BigInt], q: &BigInt, src: &[BigInt]) {
    // dst -= q * src
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

fn swap_cols(m: &mut [IntVector], i: usize, j: usize) {
    if i != j {
        m.swap(i, j);
    }
}

pub fn column_hnf(cols: &[IntVector], rows: usize) -> ColumnHnf {
    let n = cols.len();
    let mut h: Vec<IntVector> = cols.to_vec();
    for c in &h {
        assert_eq!(c.len(), rows, "column length mismatch");
    }
    let mut u: Vec<IntVector> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut c = 0usize;
    for r in 0..rows {
        if c == n {
            break;
        }
        loop {
            // smallest nonzero |entry| in row r among columns c..n
            let mut best: Option<usize> = None;
            for j in c..n {
                if !h[j][r].is_zero() {
                    match best {
                        None => best = Some(j),
                        Some(b) if h[j][r].abs() < h[b][r].abs() => best = Some(j),
                        _ => {}
                    }
                }
            }
            let Some(b) = best else { break };
            swap_cols(&mut h, c, b);
            swap_cols(&mut u, c, b);
            let mut done = true;
            for j in (c + 1)..n {
                if !h[j][r].is_zero() {
                    let q = &h[j][r] / &h[c][r];
                    let (hc, uc) = (h[c].clone(), u[c].clone());
                    axpy(&mut h[j], &q, &hc);
                    axpy(&mut u[j], &q, &uc);
                    if !h[j][r].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h.get(c).map_or(true, |col| col[r].is_zero()) {
            continue;
        }
        if h[c][r].is_negative() {
            for x in h[c].iter_mut() {
                *x = -&*x;
            }
            for x in u[c].iter_mut() {
                *x = -&*x;
            }
        }
        let (hc, uc) = (h[c].clone(), u[c].clone());
        for k in 0..c {
            let q = h[k][r].div_floor(&hc[r]);
            if !q.is_zero() {
                axpy(&mut h[k], &q, &hc);
                axpy(&mut u[k], &q, &uc);
            }
        }
        pivots.push(r);
        c += 1;
    }
    ColumnHnf {
        h,
        u,
        rank: c,
        pivots,
    }
}

/// Integer basis of `{k in Z^d : row . k = 0 for every row}`.
pub fn integer_kernel(rows: &[IntVector], d: usize) -> Vec<IntVector> {
    if rows.is_empty() {
        return (0..d)
            .map(|j| {
                (0..d)
                    .map(|i| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
    }
    let m = rows.len();
    let cols: Vec<IntVector> = (0..d)
        .map(|i| rows.iter().map(|r| r[i].clone()).collect())
        .collect();
    let f = column_hnf(&cols, m);
    f.u[f.rank..].to_vec()
}

/// Rank of a set of integer columns.
pub fn rank(cols: &[IntVector], rows: usize) -> usize {
    column_hnf(cols, rows).rank
}

/// Determinant of a square integer matrix given by columns (fraction-free).
pub fn det(cols: &[IntVector]) -> BigInt {
    let n = cols.len();
    if n == 0 {
        return BigInt::one();
    }
    let f = column_hnf(cols, n);
    if f.rank < n {
        return BigInt::zero();
    }
    // det(a) * det(u) = prod of pivots, det(u) = +-1
    let mut p = BigInt::one();
    for (j, &r) in f.pivots.iter().enumerate() {
        p *= &f.h[j][r];
    }
    let du = bareiss(&f.u);
    if du.is_negative() {
        -p
    } else {
        p
    }
}

fn bareiss(cols: &[IntVector]) -> BigInt {
    let n = cols.len();
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = ((k + 1)..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}
