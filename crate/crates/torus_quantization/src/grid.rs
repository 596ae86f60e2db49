use lattice_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Box of Fourier modes `‖k − center‖∞ ≤ radius` at semiclassical parameter `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierGrid {
    dim: usize,
    center: Vec<i64>,
    radius: usize,
    h: f64,
}

impl FourierGrid {
    pub fn new(dim: usize, radius: usize, h: f64) -> Result<Self> {
        Self::centered(vec![0; dim], radius, h)
    }

    pub fn centered(center: Vec<i64>, radius: usize, h: f64) -> Result<Self> {
        let dim = center.len();
        if dim == 0 || dim > lattice_core::MAX_DIM {
            return Err(Error::ShapeError(format!("grid dimension {dim} outside 1..=4")));
        }
        if radius < 1 {
            return Err(Error::PreconditionFailed("grid radius must be at least 1".into()));
        }
        if !(h > 0.0) {
            return Err(Error::PreconditionFailed(format!("h must be positive, got {h}")));
        }
        let side = 2 * radius + 1;
        if (side as f64).powi(dim as i32) > 2.0e8 {
            return Err(Error::PreconditionFailed(format!(
                "grid with side {side} in dimension {dim} is too large"
            )));
        }
        Ok(FourierGrid {
            dim,
            center,
            radius,
            h,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn radius(&self) -> usize {
        self.radius
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn center(&self) -> &[i64] {
        &self.center
    }
    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }
    pub fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major strides (last axis fastest).
    pub fn strides(&self) -> Vec<usize> {
        let s = self.side();
        (0..self.dim).map(|i| s.pow((self.dim - 1 - i) as u32)).collect()
    }

    pub fn mode_into(&self, mut idx: usize, out: &mut [i64]) {
        let s = self.side();
        let n = self.radius as i64;
        for i in (0..self.dim).rev() {
            out[i] = self.center[i] + (idx % s) as i64 - n;
            idx /= s;
        }
    }

    pub fn mode(&self, idx: usize) -> Vec<i64> {
        let mut k = vec![0; self.dim];
        self.mode_into(idx, &mut k);
        k
    }

    pub fn index(&self, k: &[i64]) -> Option<usize> {
        let s = self.side() as i64;
        let n = self.radius as i64;
        let mut idx = 0usize;
        for i in 0..self.dim {
            let l = k[i] - self.center[i] + n;
            if l < 0 || l >= s {
                return None;
            }
            idx = idx * s as usize + l as usize;
        }
        Some(idx)
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        self.index(k).is_some()
    }

    /// Same center and `h`, different radius.
    pub fn with_radius(&self, radius: usize) -> Result<Self> {
        Self::centered(self.center.clone(), radius, self.h)
    }

    /// Smallest centered box containing both grids.
    pub fn union(&self, other: &FourierGrid) -> Result<Self> {
        if self.center == other.center {
            return self.with_radius(self.radius.max(other.radius));
        }
        let n = (0..self.dim)
            .map(|i| {
                let a = (other.center[i] - self.center[i]).unsigned_abs() as usize;
                self.radius.max(a + other.radius)
            })
            .max()
            .unwrap();
        self.with_radius(n)
    }

    /// Visits every index `j` with `j − m` also on the grid, passing
    /// `(index of j, index of j − m, mode j)`. Row blocks along the first
    /// axis are handed to `f` in a fixed order; the closure gets the block.
    pub fn shifted_blocks(&self, m: &[i64]) -> Vec<ShiftBlock> {
        let s = self.side() as i64;
        let lo: Vec<i64> = m.iter().map(|&mi| mi.max(0)).collect();
        let hi: Vec<i64> = m.iter().map(|&mi| (s + mi).min(s)).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return vec![];
        }
        (lo[0]..hi[0])
            .map(|l0| ShiftBlock {
                first: l0 as usize,
                lo: lo.clone(),
                hi: hi.clone(),
            })
            .collect()
    }
}

/// A slab of the shifted iteration with fixed first-axis local index.
#[derive(Debug, Clone)]
pub struct ShiftBlock {
    pub first: usize,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl ShiftBlock {
    /// Calls `f(idx_j, idx_{j-m}, j)` over the block.
    pub fn for_each(&self, grid: &FourierGrid, m: &[i64], mut f: impl FnMut(usize, usize, &[i64])) {
        let d = grid.dim();
        let strides = grid.strides();
        let n = grid.radius() as i64;
        let mut local: Vec<i64> = self.lo.clone();
        local[0] = self.first as i64;
        let mut k: Vec<i64> = vec![0; d];
        let shift: i64 = m.iter().zip(&strides).map(|(a, b)| a * *b as i64).sum();
        if d == 1 {
            let idx = local[0] as usize;
            k[0] = grid.center()[0] + local[0] - n;
            f(idx, (idx as i64 - shift) as usize, &k);
            return;
        }
        loop {
            let mut idx = 0usize;
            for i in 0..d {
                idx += local[i] as usize * strides[i];
                k[i] = grid.center()[i] + local[i] - n;
            }
            // innermost axis run
            let last = d - 1;
            let run = (self.hi[last] - local[last]) as usize;
            for r in 0..run {
                let id = idx + r;
                f(id, (id as i64 - shift) as usize, &k);
                k[last] += 1;
            }
            // advance the middle axes
            let mut i = last;
            loop {
                if i == 1 {
                    return;
                }
                i -= 1;
                local[i] += 1;
                if local[i] < self.hi[i] {
                    break;
                }
                local[i] = self.lo[i];
            }
        }
    }
}
