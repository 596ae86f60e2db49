use crate::fft::{fold_into, NdFft};
use crate::state::FourierState;
use lattice_core::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

/// `|u(x)|²` on the points `x_n = 2π n / resolution`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub dim: usize,
    pub resolution: usize,
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn cell_volume(&self) -> f64 {
        (2.0 * PI / self.resolution as f64).powi(self.dim as i32)
    }

    /// Riemann sum of the values.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        let step = 2.0 * PI / self.resolution as f64;
        for i in (0..self.dim).rev() {
            x[i] = (idx % self.resolution) as f64 * step;
            idx /= self.resolution;
        }
        x
    }

    /// Density of the marginal on one axis: the other coordinates are integrated out.
    pub fn marginal(&self, axis: usize) -> Vec<f64> {
        let r = self.resolution;
        let stride = r.pow((self.dim - 1 - axis) as u32);
        let other = (2.0 * PI / r as f64).powi(self.dim as i32 - 1);
        let mut out = vec![0.0; r];
        for (i, v) in self.values.iter().enumerate() {
            out[(i / stride) % r] += v * other;
        }
        out
    }

    /// Index of the largest value.
    pub fn argmax(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
            .0
    }

    /// CSV with columns `x1,...,xd,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header: Vec<String> = (1..=self.dim).map(|i| format!("x{i}")).collect();
        writeln!(w, "{},value", header.join(","))?;
        for (i, v) in self.values.iter().enumerate() {
            let x = self.point(i);
            let xs: Vec<String> = x.iter().map(|c| format!("{c:.10}")).collect();
            writeln!(w, "{},{:.17e}", xs.join(","), v)?;
        }
        Ok(())
    }
}

/// Exact samples of `|u|²` at any resolution (modes are folded modulo the resolution).
pub fn sampled_density(u: &FourierState, resolution: usize) -> Result<DensityGrid> {
    if resolution == 0 {
        return Err(Error::PreconditionFailed("resolution must be positive".into()));
    }
    let d = u.dim();
    let fft = NdFft::new(resolution, d);
    let mut buf = vec![Complex64::new(0.0, 0.0); fft.len()];
    fold_into(&u.grid, &u.coeffs, resolution, &mut buf);
    fft.inverse(&mut buf);
    let norm = (2.0 * PI).powi(-(d as i32));
    Ok(DensityGrid {
        dim: d,
        resolution,
        values: buf.iter().map(|c| c.norm_sqr() * norm).collect(),
    })
}

/// Position density on a grid fine enough that the Riemann sum is exact.
pub fn position_density(u: &FourierState, resolution: usize) -> Result<DensityGrid> {
    if resolution < u.grid.side() {
        return Err(Error::PreconditionFailed(format!(
            "resolution {resolution} below 2N+1 = {}",
            u.grid.side()
        )));
    }
    sampled_density(u, resolution)
}

/// Exact mass of `|u|²` on `{x : dist(n·x − c, 2πZ) < w}` for a primitive integer `n`.
pub fn slab_mass(u: &FourierState, n: &[i64], c: f64, w: f64) -> Result<f64> {
    let d = u.dim();
    if n.len() != d || n.iter().all(|&v| v == 0) {
        return Err(Error::ShapeError("slab normal must be a nonzero vector of the grid dimension".into()));
    }
    let g = n.iter().fold(0i64, |a, &b| num_gcd(a, b));
    if g != 1 {
        return Err(Error::PreconditionFailed(format!("slab normal {n:?} is not primitive")));
    }
    if w <= 0.0 {
        return Ok(0.0);
    }
    if w >= PI {
        return Ok(u.norm_sqr());
    }
    let corr = line_autocorrelation(u, n);
    if corr.is_empty() {
        return Ok(0.0);
    }
    // (1/2π)∫_{c−w}^{c+w} e^{iqs} ds
    let mut total = corr[0].re * w / PI;
    for (q, cq) in corr.iter().enumerate().skip(1) {
        let qf = q as f64;
        let kern = Complex64::from_polar((qf * w).sin() / (PI * qf), qf * c);
        // C_{−q} = conj(C_q)
        total += 2.0 * (cq * kern).re;
    }
    Ok(total)
}

fn num_gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `C_q = Σ_j conj(û_j) û_{j+qn}` for `q ≥ 0`.
pub fn line_autocorrelation(u: &FourierState, n: &[i64]) -> Vec<Complex64> {
    let d = u.dim();
    let grid = &u.grid;
    let mut planner = FftPlanner::<f64>::new();
    let mut plans: HashMap<usize, _> = HashMap::new();
    let mut out: Vec<Complex64> = Vec::new();
    let mut k = vec![0i64; d];
    let mut prev = vec![0i64; d];
    for start in 0..grid.len() {
        grid.mode_into(start, &mut k);
        for i in 0..d {
            prev[i] = k[i] - n[i];
        }
        if grid.contains(&prev) {
            continue;
        }
        let mut line = Vec::new();
        let mut cur = k.clone();
        while let Some(idx) = grid.index(&cur) {
            line.push(u.coeffs[idx]);
            for i in 0..d {
                cur[i] += n[i];
            }
        }
        if line.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
            continue;
        }
        let len = line.len();
        if out.len() < len {
            out.resize(len, Complex64::new(0.0, 0.0));
        }
        if len <= 32 {
            for q in 0..len {
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..len - q {
                    s += line[j].conj() * line[j + q];
                }
                out[q] += s;
            }
            continue;
        }
        let m = 2 * len;
        let (fwd, inv) = plans
            .entry(m)
            .or_insert_with(|| (planner.plan_fft_forward(m), planner.plan_fft_inverse(m)))
            .clone();
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        buf[..len].copy_from_slice(&line);
        fwd.process(&mut buf);
        for b in buf.iter_mut() {
            *b = Complex64::new(b.norm_sqr(), 0.0);
        }
        inv.process(&mut buf);
        for q in 0..len {
            out[q] += buf[q] / m as f64;
        }
    }
    out
}
