use crate::grid::FourierGrid;
use crate::state::FourierState;
use crate::symbol::TorusSymbol;
use lattice_core::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// Fixed chunk length for parallel sums; partial sums are combined in chunk order.
pub const CHUNK: usize = 2048;

fn check(a: &TorusSymbol, grid: &FourierGrid) -> Result<()> {
    if a.dim() != grid.dim() {
        return Err(Error::ShapeError(format!(
            "symbol of dimension {} on a grid of dimension {}",
            a.dim(),
            grid.dim()
        )));
    }
    Ok(())
}

/// Local coordinates `k − center + N` of a flat index.
#[inline]
fn local_coords(mut idx: usize, side: usize, out: &mut [i64]) {
    for i in (0..out.len()).rev() {
        out[i] = (idx % side) as i64;
        idx /= side;
    }
}

/// `Σ_{j, m} f(m index, j index, (j − m) index, h(j − m/2))` over pairs with both
/// `j` and `j − m` on the grid. Deterministic for a given grid.
pub fn banded_sum<F>(grid: &FourierGrid, modes: &[Vec<i64>], f: F) -> Complex64
where
    F: Fn(usize, usize, usize, &[f64]) -> Complex64 + Sync,
{
    let d = grid.dim();
    let side = grid.side();
    let strides = grid.strides();
    let h = grid.h();
    let n = grid.radius() as i64;
    let center = grid.center();
    let shifts: Vec<i64> = modes
        .iter()
        .map(|m| m.iter().zip(&strides).map(|(a, b)| a * *b as i64).sum())
        .collect();
    let nchunks = grid.len().div_ceil(CHUNK);
    let partial: Vec<Complex64> = (0..nchunks)
        .into_par_iter()
        .map(|c| {
            let mut loc = vec![0i64; d];
            let mut xi = vec![0.0; d];
            let mut acc = Complex64::new(0.0, 0.0);
            for j in c * CHUNK..((c + 1) * CHUNK).min(grid.len()) {
                local_coords(j, side, &mut loc);
                for (mi, m) in modes.iter().enumerate() {
                    if loc
                        .iter()
                        .zip(m)
                        .any(|(l, mm)| l - mm < 0 || l - mm >= side as i64)
                    {
                        continue;
                    }
                    for i in 0..d {
                        xi[i] = h * ((center[i] + loc[i] - n) as f64 - m[i] as f64 / 2.0);
                    }
                    let jm = (j as i64 - shifts[mi]) as usize;
                    acc += f(mi, j, jm, &xi);
                }
            }
            acc
        })
        .collect();
    partial.into_iter().sum()
}

/// `Op_h(a)u` on a prescribed output grid (same `h` and dimension as `u`).
/// Output modes whose preimages leave the input grid only see the part that stays.
pub fn weyl_apply_on(a: &TorusSymbol, u: &FourierState, out: &FourierGrid) -> Result<FourierState> {
    check(a, &u.grid)?;
    if out.dim() != u.dim() || out.h() != u.h() {
        return Err(Error::ShapeError("output grid must share dimension and h".into()));
    }
    let d = u.dim();
    let h = u.h();
    let mut res = FourierState::zeros(out.clone());
    res.coeffs
        .par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(c, chunk)| {
            let mut j = vec![0i64; d];
            let mut km = vec![0i64; d];
            let mut xi = vec![0.0; d];
            for (off, v) in chunk.iter_mut().enumerate() {
                out.mode_into(c * CHUNK + off, &mut j);
                let mut acc = Complex64::new(0.0, 0.0);
                for (mi, m) in a.modes().iter().enumerate() {
                    for i in 0..d {
                        km[i] = j[i] - m[i];
                    }
                    if let Some(k) = u.grid.index(&km) {
                        let c = u.coeffs[k];
                        if c.re == 0.0 && c.im == 0.0 {
                            continue;
                        }
                        for i in 0..d {
                            xi[i] = h * (j[i] as f64 - m[i] as f64 / 2.0);
                        }
                        acc += a.coeff(mi, &xi) * c;
                    }
                }
                *v = acc;
            }
        });
    res.normalized = false;
    Ok(res)
}

/// `Op_h(a)u` on the grid enlarged by the symbol's bandwidth, so nothing is dropped.
pub fn weyl_apply(a: &TorusSymbol, u: &FourierState) -> Result<FourierState> {
    let out = u.grid.with_radius(u.grid.radius() + a.bandwidth()).map_err(|_| {
        Error::TruncationError {
            required_radius: u.grid.radius() + a.bandwidth(),
        }
    })?;
    weyl_apply_on(a, u, &out)
}

/// `⟨u, Op_h(a) v⟩` for states on the same grid.
pub fn weyl_form(u: &FourierState, a: &TorusSymbol, v: &FourierState) -> Result<Complex64> {
    check(a, &u.grid)?;
    if u.grid != v.grid {
        return Err(Error::ShapeError("weyl_form needs both states on one grid".into()));
    }
    Ok(banded_sum(&u.grid, a.modes(), |mi, j, jm, xi| {
        let p = u.coeffs[j].conj() * v.coeffs[jm];
        if p.re == 0.0 && p.im == 0.0 {
            return p;
        }
        a.coeff(mi, xi) * p
    }))
}

/// `⟨u, Op_h(a) u⟩` as a complex number.
pub fn wigner_pairing_complex(u: &FourierState, a: &TorusSymbol) -> Result<Complex64> {
    weyl_form(u, a, u)
}

/// `⟨u, Op_h(a) u⟩`; the real part (exact for real symbols).
pub fn wigner_pairing(u: &FourierState, a: &TorusSymbol) -> Result<f64> {
    Ok(wigner_pairing_complex(u, a)?.re)
}
