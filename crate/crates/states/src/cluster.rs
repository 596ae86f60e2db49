use hamiltonians::HamiltonianModel;
use lattice_core::{Error, Result};
use num_complex::Complex64;
use torus_quantization::{energies, FourierGrid, FourierState};

/// Default relative tolerance for membership in an energy level set.
pub const LEVEL_TOL: f64 = 1e-12;

/// Grid modes with `|H(hk) − E| ≤ tol · max(1, |E|)`, in grid order.
pub fn level_set(grid: &FourierGrid, model: &HamiltonianModel, energy: f64, tol: f64) -> Vec<usize> {
    let thr = tol * energy.abs().max(1.0);
    energies(grid, model)
        .iter()
        .enumerate()
        .filter(|(_, e)| (*e - energy).abs() <= thr)
        .map(|(i, _)| i)
        .collect()
}

/// `Σ_{H(hk)=E} c_k e^{ik·x}` normalized; uniform `c_k` unless coefficients are given
/// (one per level-set mode, in grid order).
pub fn eigenfunction_cluster(
    energy: f64,
    grid: &FourierGrid,
    model: &HamiltonianModel,
    coeffs: Option<&[Complex64]>,
    tol: f64,
) -> Result<FourierState> {
    let modes = level_set(grid, model, energy, tol);
    if modes.is_empty() {
        return Err(Error::EmptyCluster(format!("no grid mode with H(hk) = {energy}")));
    }
    let values: Vec<Complex64> = match coeffs {
        Some(c) if c.len() != modes.len() => {
            return Err(Error::ShapeError(format!(
                "{} coefficients for a level set of {} modes",
                c.len(),
                modes.len()
            )))
        }
        Some(c) => c.to_vec(),
        None => vec![Complex64::new(1.0, 0.0); modes.len()],
    };
    let mut u = FourierState::zeros(grid.clone());
    for (i, v) in modes.into_iter().zip(values) {
        u.coeffs[i] = v;
    }
    u.normalize()?;
    Ok(u)
}

/// One entry of the h-oscillation table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationRow {
    pub h: f64,
    pub r: f64,
    /// Mass of the modes with `|hk|² ≥ R`.
    pub tail: f64,
}

/// Tail masses `‖1_{[R,∞)}(−h²Δ) u‖²` for a state.
pub fn oscillation_tails(u: &FourierState, r_list: &[f64]) -> Vec<OscillationRow> {
    let h = u.h();
    let mut k = vec![0i64; u.dim()];
    let weights: Vec<(f64, f64)> = u
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            u.grid.mode_into(i, &mut k);
            (k.iter().map(|v| (h * *v as f64).powi(2)).sum(), c.norm_sqr())
        })
        .collect();
    r_list
        .iter()
        .map(|&r| OscillationRow {
            h,
            r,
            tail: weights.iter().filter(|(e, _)| *e >= r).map(|(_, m)| m).sum(),
        })
        .collect()
}
