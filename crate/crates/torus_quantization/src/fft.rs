use crate::grid::FourierGrid;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Multi-dimensional FFT on a cube of side `side`, row-major with the last axis fastest.
/// Plans are built once and shared read-only.
#[derive(Clone)]
pub struct NdFft {
    side: usize,
    dim: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl NdFft {
    pub fn new(side: usize, dim: usize) -> Self {
        let mut p = FftPlanner::new();
        NdFft {
            side,
            dim,
            fwd: p.plan_fft_forward(side),
            inv: p.plan_fft_inverse(side),
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.side == 0
    }

    /// Unnormalized `Σ_q a_q e^{−2πi q·n/side}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.fwd);
    }

    /// Unnormalized `Σ_q a_q e^{+2πi q·n/side}`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inv);
    }

    fn run(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let s = self.side;
        assert_eq!(data.len(), self.len());
        for axis in 0..self.dim {
            let st = s.pow((self.dim - 1 - axis) as u32);
            if st == 1 {
                data.par_chunks_mut(s.max(1024 / s * s)).for_each(|c| {
                    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
                    plan.process_with_scratch(c, &mut scratch);
                });
                continue;
            }
            let block = s * st;
            // each contiguous block of side·st holds st interleaved lines
            data.par_chunks_mut(block).for_each(|blk| {
                let mut line = vec![Complex64::new(0.0, 0.0); s];
                let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
                for inner in 0..st {
                    for q in 0..s {
                        line[q] = blk[q * st + inner];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for q in 0..s {
                        blk[q * st + inner] = line[q];
                    }
                }
            });
        }
    }
}

/// Writes the grid coefficients into an FFT buffer of side `side`, placing mode `k`
/// at `(k − center) mod side` along each axis. Colliding modes are added.
pub fn fold_into(grid: &FourierGrid, coeffs: &[Complex64], side: usize, buf: &mut [Complex64]) {
    let d = grid.dim();
    let gs = grid.side();
    let n = grid.radius() as i64;
    let s = side as i64;
    buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
    let mut loc = vec![0i64; d];
    for (idx, c) in coeffs.iter().enumerate() {
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let mut r = idx;
        for i in (0..d).rev() {
            loc[i] = (r % gs) as i64 - n;
            r /= gs;
        }
        let mut t = 0usize;
        for &l in loc.iter() {
            t = t * side + l.rem_euclid(s) as usize;
        }
        buf[t] += *c;
    }
}

/// Inverse of [`fold_into`] when `side == grid.side()`.
pub fn unfold_from(grid: &FourierGrid, buf: &[Complex64], coeffs: &mut [Complex64]) {
    let d = grid.dim();
    let gs = grid.side();
    let n = grid.radius() as i64;
    let s = gs as i64;
    coeffs.par_chunks_mut(4096).enumerate().for_each(|(c, chunk)| {
        let mut loc = vec![0i64; d];
        for (off, v) in chunk.iter_mut().enumerate() {
            let mut r = c * 4096 + off;
            for i in (0..d).rev() {
                loc[i] = (r % gs) as i64 - n;
                r /= gs;
            }
            let mut t = 0usize;
            for &l in loc.iter() {
                t = t * gs + l.rem_euclid(s) as usize;
            }
            *v = buf[t];
        }
    });
}

/// Points `x_n = 2π n / side` of the cube, row-major.
pub fn grid_point(mut idx: usize, side: usize, out: &mut [f64]) {
    let step = 2.0 * std::f64::consts::PI / side as f64;
    for i in (0..out.len()).rev() {
        out[i] = (idx % side) as f64 * step;
        idx /= side;
    }
}
