use crate::grid::FourierGrid;
use lattice_core::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Tolerance attached to the `normalized` flag.
pub const NORM_TOL: f64 = 1e-12;

/// Fourier coefficients `û(k)` on a grid, with `u = Σ û(k) e^{ik·x} / (2π)^{d/2}`
/// so that `‖u‖²_{L²} = Σ |û(k)|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierState {
    pub grid: FourierGrid,
    pub coeffs: Vec<Complex64>,
    pub normalized: bool,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    dim: usize,
    #[serde(rename = "N")]
    n: usize,
    h: f64,
    center: Vec<i64>,
    coeffs: Vec<(Vec<i64>, f64, f64)>,
}

impl Serialize for FourierState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(i, c)| (self.grid.mode(i), c.re, c.im))
            .collect();
        StateJson {
            dim: self.grid.dim(),
            n: self.grid.radius(),
            h: self.grid.h(),
            center: self.grid.center().to_vec(),
            coeffs,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FourierState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = StateJson::deserialize(d)?;
        let center = if j.center.is_empty() { vec![0; j.dim] } else { j.center };
        let grid = FourierGrid::centered(center, j.n, j.h).map_err(serde::de::Error::custom)?;
        let mut u = FourierState::zeros(grid);
        for (k, re, im) in j.coeffs {
            let i = u
                .grid
                .index(&k)
                .ok_or_else(|| serde::de::Error::custom(format!("mode {k:?} outside the grid")))?;
            u.coeffs[i] = Complex64::new(re, im);
        }
        u.normalized = (u.norm_sqr() - 1.0).abs() < NORM_TOL;
        Ok(u)
    }
}

impl FourierState {
    pub fn zeros(grid: FourierGrid) -> Self {
        let n = grid.len();
        FourierState {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); n],
            normalized: false,
        }
    }

    pub fn from_coeffs(grid: FourierGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeError(format!(
                "{} coefficients for a grid of {} modes",
                coeffs.len(),
                grid.len()
            )));
        }
        let mut u = FourierState {
            grid,
            coeffs,
            normalized: false,
        };
        u.normalized = (u.norm_sqr() - 1.0).abs() < NORM_TOL;
        Ok(u)
    }

    /// Unit-norm plane wave `e^{ik·x}/(2π)^{d/2}`.
    pub fn plane_wave(grid: FourierGrid, k: &[i64]) -> Result<Self> {
        let i = grid
            .index(k)
            .ok_or_else(|| Error::TruncationError {
                required_radius: k
                    .iter()
                    .zip(grid.center())
                    .map(|(a, c)| (a - c).unsigned_abs() as usize)
                    .max()
                    .unwrap_or(0),
            })?;
        let mut u = Self::zeros(grid);
        u.coeffs[i] = Complex64::new(1.0, 0.0);
        u.normalized = true;
        Ok(u)
    }

    pub fn h(&self) -> f64 {
        self.grid.h()
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn get(&self, k: &[i64]) -> Complex64 {
        self.grid
            .index(k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        // fixed-order sum so that results do not depend on scheduling
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm and returns the norm before rescaling.
    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::DegenerateInput("cannot normalize the zero state".into()));
        }
        for c in self.coeffs.iter_mut() {
            *c /= n;
        }
        self.normalized = true;
        Ok(n)
    }

    pub fn inner(&self, other: &FourierState) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::ShapeError("inner product across different grids".into()));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Copies the coefficients onto another grid; modes outside it are dropped
    /// and the dropped mass is returned.
    pub fn regrid(&self, grid: &FourierGrid) -> Result<(FourierState, f64)> {
        if grid.dim() != self.dim() || grid.h() != self.h() {
            return Err(Error::ShapeError("regrid needs the same dimension and h".into()));
        }
        let mut out = FourierState::zeros(grid.clone());
        let mut lost = 0.0;
        let mut k = vec![0i64; self.dim()];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            self.grid.mode_into(i, &mut k);
            match grid.index(&k) {
                Some(j) => out.coeffs[j] = *c,
                None => lost += c.norm_sqr(),
            }
        }
        out.normalized = (out.norm_sqr() - 1.0).abs() < NORM_TOL;
        Ok((out, lost))
    }

    /// Coefficient mass in the outer band `radius − band < ‖k − center‖∞`.
    pub fn edge_mass(&self, band: usize) -> f64 {
        let n = self.grid.radius() as i64;
        let inner = n - band as i64;
        let mut k = vec![0i64; self.dim()];
        let c = self.grid.center().to_vec();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm_sqr() > 0.0)
            .filter(|(i, _)| {
                self.grid.mode_into(*i, &mut k);
                k.iter().zip(&c).any(|(a, b)| (a - b).abs() > inner)
            })
            .map(|(_, v)| v.norm_sqr())
            .sum()
    }

    /// Mass of the modes with `|hk − ξ0| > r`.
    pub fn momentum_tail(&self, xi0: &[f64], r: f64) -> f64 {
        let h = self.h();
        let mut k = vec![0i64; self.dim()];
        let mut s = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            self.grid.mode_into(i, &mut k);
            let d2: f64 = k.iter().zip(xi0).map(|(a, b)| (h * *a as f64 - b).powi(2)).sum();
            if d2 > r * r {
                s += c.norm_sqr();
            }
        }
        s
    }
}
