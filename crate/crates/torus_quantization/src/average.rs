use crate::propagate::{energies, for_each_sample, PotentialSpec};
use crate::state::FourierState;
use crate::symbol::TorusSymbol;
use crate::weyl::{banded_sum, wigner_pairing};
use hamiltonians::HamiltonianModel;
use lattice_core::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default number of time samples.
pub const DEFAULT_SAMPLES: usize = 256;

/// Uniform time samples on `[t_a, t_b]` with trapezoid weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeWindow {
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

impl TimeWindow {
    pub fn new(start: f64, end: f64, samples: usize) -> Result<Self> {
        if samples < 2 {
            return Err(Error::PreconditionFailed("at least two time samples are needed".into()));
        }
        if !(end > start) {
            return Err(Error::PreconditionFailed(format!("empty time window [{start}, {end}]")));
        }
        Ok(TimeWindow { start, end, samples })
    }

    pub fn times(&self) -> Vec<f64> {
        let m = self.samples;
        let step = (self.end - self.start) / (m - 1) as f64;
        (0..m).map(|n| self.start + n as f64 * step).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        trapezoid_weights(self.samples)
    }

    /// `Σ_n w_n e^{i ω t_n}`.
    pub fn phase_average(&self, omega: f64) -> Complex64 {
        let m = self.samples;
        let step = (self.end - self.start) / (m - 1) as f64;
        let theta = omega * step;
        let first = Complex64::from_polar(1.0, omega * self.start);
        let last = Complex64::from_polar(1.0, omega * self.start + theta * (m - 1) as f64);
        let geo = first * geometric_sum(theta, m);
        (geo - (first + last) * 0.5) / (m - 1) as f64
    }
}

/// Trapezoid weights for `m ≥ 2` uniform samples, normalized to sum one.
pub fn trapezoid_weights(m: usize) -> Vec<f64> {
    let mut w = vec![1.0 / (m - 1) as f64; m];
    w[0] *= 0.5;
    w[m - 1] *= 0.5;
    w
}

/// `Σ_{n=0}^{m−1} e^{iθn}`.
fn geometric_sum(theta: f64, m: usize) -> Complex64 {
    let r = theta - 2.0 * PI * (theta / (2.0 * PI)).round();
    let mf = m as f64;
    let ratio = if r.abs() < 1e-7 {
        mf * (1.0 - (mf * mf - 1.0) * r * r / 24.0)
    } else {
        (mf * r / 2.0).sin() / (r / 2.0).sin()
    };
    Complex64::from_polar(ratio, r * (mf - 1.0) / 2.0)
}

/// Trapezoid average of `⟨S_h^{τt}u0, Op_h(a) S_h^{τt}u0⟩` over the window.
///
/// With `V = 0` the average is summed in closed form per matrix element, so the cost
/// does not depend on the number of samples. Otherwise the state is propagated with
/// split-step size `dt` and sampled.
pub fn time_averaged_pairing(
    u0: &FourierState,
    a: &TorusSymbol,
    model: &HamiltonianModel,
    potential: &PotentialSpec,
    tau: f64,
    window: &TimeWindow,
    dt: f64,
) -> Result<f64> {
    Ok(time_averaged_pairings(u0, std::slice::from_ref(a), model, potential, tau, window, dt)?[0])
}

/// As [`time_averaged_pairing`] for several symbols sharing one propagation.
pub fn time_averaged_pairings(
    u0: &FourierState,
    symbols: &[TorusSymbol],
    model: &HamiltonianModel,
    potential: &PotentialSpec,
    tau: f64,
    window: &TimeWindow,
    dt: f64,
) -> Result<Vec<f64>> {
    if potential.is_zero() {
        let e = energies(&u0.grid, model);
        let h = u0.h();
        return symbols
            .iter()
            .map(|a| {
                if a.dim() != u0.dim() {
                    return Err(Error::ShapeError("symbol and state dimensions differ".into()));
                }
                let v = banded_sum(&u0.grid, a.modes(), |mi, j, jm, xi| {
                    let p = u0.coeffs[j].conj() * u0.coeffs[jm];
                    if p.re == 0.0 && p.im == 0.0 {
                        return p;
                    }
                    let avg = window.phase_average(tau * (e[j] - e[jm]) / h);
                    a.coeff(mi, xi) * p * avg
                });
                Ok(v.re)
            })
            .collect();
    }
    let times: Vec<f64> = window.times().iter().map(|t| tau * t).collect();
    if times[0] < 0.0 || tau < 0.0 {
        return Err(Error::PreconditionFailed("perturbed averages need τ·t ≥ 0".into()));
    }
    let w = window.weights();
    let mut acc = vec![0.0; symbols.len()];
    for_each_sample(u0, model, potential, &times, dt, |i, u| {
        for (s, a) in acc.iter_mut().zip(symbols) {
            *s += w[i] * wigner_pairing(u, a)?;
        }
        Ok(())
    })?;
    Ok(acc)
}
