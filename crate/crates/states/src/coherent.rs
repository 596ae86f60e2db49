use crate::profile::{ProfileSpec, TAIL_TOL};
use lattice_core::{Error, Result};
use num_complex::Complex64;
use torus_quantization::{FourierGrid, FourierState};

/// A generated state together with its norm before renormalization.
#[derive(Debug, Clone)]
pub struct Built {
    pub state: FourierState,
    pub raw_norm: f64,
}

/// Radius of the box `|k − ξ0/h|∞ ≤ Z/ε` that carries all but `TAIL_TOL` of the mass.
fn tail_box(xi0: &[f64], eps: f64, h: f64, profile: &ProfileSpec) -> Vec<(i64, i64)> {
    let z = profile.tail_radius(TAIL_TOL / xi0.len() as f64) / eps;
    xi0.iter()
        .map(|x| ((x / h - z).floor() as i64, (x / h + z).ceil() as i64))
        .collect()
}

/// Grid centered at `round(ξ0/h)` wide enough for the profile's momentum tail.
pub fn coherent_grid(xi0: &[f64], eps: f64, h: f64, profile: &ProfileSpec) -> Result<FourierGrid> {
    let center: Vec<i64> = xi0.iter().map(|x| (x / h).round() as i64).collect();
    let n = tail_box(xi0, eps, h, profile)
        .iter()
        .zip(&center)
        .map(|((lo, hi), c)| (c - lo).max(hi - c))
        .max()
        .unwrap_or(1)
        .max(1) as usize;
    FourierGrid::centered(center, n, h)
}

/// `u = P[ε^{−d/2} ρ((x − x0)/ε) e^{iξ0·x/h}]`, computed from
/// `û(k) = ε^{d/2} ρ̂(ε(k − ξ0/h)) e^{−i(k − ξ0/h)·x0}` and renormalized.
pub fn coherent_state(
    x0: &[f64],
    xi0: &[f64],
    eps: f64,
    profile: &ProfileSpec,
    grid: &FourierGrid,
) -> Result<Built> {
    let d = grid.dim();
    if x0.len() != d || xi0.len() != d {
        return Err(Error::ShapeError("x0 and ξ0 must match the grid dimension".into()));
    }
    profile.validate()?;
    let h = grid.h();
    if !(eps >= h) {
        return Err(Error::PreconditionFailed(format!("ε = {eps} below h = {h}")));
    }
    let n = grid.radius() as i64;
    let required = tail_box(xi0, eps, h, profile)
        .iter()
        .zip(grid.center())
        .map(|((lo, hi), c)| (c - lo).max(hi - c))
        .max()
        .unwrap_or(0);
    if required > n {
        return Err(Error::TruncationError {
            required_radius: required as usize,
        });
    }
    let side = grid.side();
    let axes: Vec<Vec<Complex64>> = (0..d)
        .map(|i| {
            (0..side)
                .map(|l| {
                    let k = grid.center()[i] + l as i64 - n;
                    let off = k as f64 - xi0[i] / h;
                    let amp = eps.sqrt() * profile.hat_1d(eps * off);
                    Complex64::from_polar(amp, -off * x0[i])
                })
                .collect()
        })
        .collect();
    let raw_norm: f64 = axes
        .iter()
        .map(|a| a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        .product();
    let mut coeffs = vec![Complex64::new(1.0, 0.0); grid.len()];
    let strides = grid.strides();
    for (idx, c) in coeffs.iter_mut().enumerate() {
        for i in 0..d {
            *c *= axes[i][(idx / strides[i]) % side];
        }
    }
    let mut state = FourierState::from_coeffs(grid.clone(), coeffs)?;
    state.normalize()?;
    Ok(Built { state, raw_norm })
}

/// Coherent state whose modulation is shifted to `ξ0 + η0/τ`.
pub fn modulated_coherent_state(
    x0: &[f64],
    xi0: &[f64],
    eta0: &[f64],
    eps: f64,
    tau: f64,
    profile: &ProfileSpec,
    grid: &FourierGrid,
) -> Result<Built> {
    if eta0.len() != xi0.len() {
        return Err(Error::ShapeError("η0 and ξ0 differ in dimension".into()));
    }
    if !(tau > 0.0) {
        return Err(Error::PreconditionFailed(format!("τ must be positive, got {tau}")));
    }
    let shifted: Vec<f64> = xi0.iter().zip(eta0).map(|(a, b)| a + b / tau).collect();
    coherent_state(x0, &shifted, eps, profile, grid)
}
