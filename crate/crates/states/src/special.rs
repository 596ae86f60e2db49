use crate::coherent::{coherent_grid, coherent_state, Built};
use crate::profile::{ProfileSpec, TAIL_TOL};
use lattice_core::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use torus_quantization::{FourierGrid, FourierState, TorusSymbol};

/// `0` for `t ≤ 0`, `1` for `t ≥ 1`, smooth in between.
pub fn smooth_step(t: f64) -> f64 {
    let g = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    let (a, b) = (g(t), g(1.0 - t));
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Equal to one on `|x| ≤ inner`, zero on `|x| ≥ outer`.
pub fn plateau(x: f64, inner: f64, outer: f64) -> f64 {
    1.0 - smooth_step((x.abs() - inner) / (outer - inner))
}

/// `x` reduced to `[−π, π)`.
pub fn centered_angle(x: f64) -> f64 {
    x - 2.0 * PI * ((x + PI) / (2.0 * PI)).floor()
}

/// Fourier coefficients `(2π)^{−1}∫ f(x) e^{−imx} dx` of a smooth 2π-periodic function,
/// for `|m| ≤ samples/2 − 1`, by the trapezoid rule on `samples` points.
pub fn periodic_coefficients(f: impl Fn(f64) -> f64, samples: usize) -> Vec<(i64, Complex64)> {
    let mut buf: Vec<Complex64> = (0..samples)
        .map(|n| Complex64::new(f(2.0 * PI * n as f64 / samples as f64), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(samples).process(&mut buf);
    let half = (samples / 2) as i64 - 1;
    (-half..=half)
        .map(|m| (m, buf[m.rem_euclid(samples as i64) as usize] / samples as f64))
        .collect()
}

/// Relative `ℓ¹` weight of the Fourier modes dropped from the Wunsch well.
pub const POTENTIAL_TOL: f64 = 1e-9;

/// Smallest `n` such that the weights of the modes with `|m| > n` sum to at most `budget`.
fn tail_cut(coef: &[(i64, Complex64)], weight: &[f64], budget: f64) -> usize {
    let mut order: Vec<usize> = (0..coef.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(coef[i].0.unsigned_abs()));
    let mut acc = 0.0;
    let mut cut = 0;
    let mut pos = 0;
    while pos < order.len() {
        let m = coef[order[pos]].0.unsigned_abs();
        let mut shell = 0.0;
        while pos < order.len() && coef[order[pos]].0.unsigned_abs() == m {
            shell += weight[order[pos]];
            pos += 1;
        }
        if acc + shell > budget {
            cut = m as usize;
            break;
        }
        acc += shell;
    }
    cut
}

fn inverse_h(h: f64) -> Result<i64> {
    let n = (1.0 / h).round();
    if ((1.0 / h) - n).abs() > 1e-9 || n < 1.0 {
        return Err(Error::InvalidRecipe(format!("1/h must be an integer, got h = {h}")));
    }
    Ok(n as i64)
}

fn finish(grid: FourierGrid, coeffs: Vec<Complex64>) -> Result<Built> {
    let mut state = FourierState::from_coeffs(grid, coeffs)?;
    let raw_norm = state.normalize()?;
    Ok(Built { state, raw_norm })
}

/// Periodization of `(2πh)^{−1/2} ρ((x₁ − x₂)/h)` on T²: `û(j, −j) = h^{1/2} ρ̂(hj)`.
pub fn lagrangian_diag(profile: &ProfileSpec, h: f64) -> Result<Built> {
    profile.validate()?;
    let z = profile.tail_radius(TAIL_TOL);
    let n = (z / h).ceil() as usize + 1;
    let grid = FourierGrid::new(2, n, h)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for j in -(n as i64)..=n as i64 {
        let idx = grid.index(&[j, -j]).expect("antidiagonal lies in the square");
        coeffs[idx] = Complex64::new(h.sqrt() * profile.hat_1d(h * j as f64), 0.0);
    }
    finish(grid, coeffs)
}

/// Periodization of `(2πε)^{−1/2} ρ((x₂ + x₃)/ε) e^{i(αx₁ + x₂ + x₃)/h}` on T³.
/// `1/h` must be an integer and `α/h` is rounded to the nearest integer.
pub fn example3(alpha: f64, eps: f64, profile: &ProfileSpec, h: f64) -> Result<Built> {
    profile.validate()?;
    let inv = inverse_h(h)?;
    if !(eps >= h) {
        return Err(Error::InvalidRecipe(format!("ε = {eps} below h = {h}")));
    }
    let k1 = (alpha / h).round() as i64;
    let z = profile.tail_radius(TAIL_TOL);
    let n = (z / eps).ceil() as usize + 1;
    let grid = FourierGrid::centered(vec![k1, inv, inv], n, h)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for m in (inv - n as i64)..=(inv + n as i64) {
        let idx = grid.index(&[k1, m, m]).expect("line lies in the cube");
        let amp = eps.sqrt() * profile.hat_1d(eps * (m - inv) as f64);
        coeffs[idx] = Complex64::new((2.0 * PI).sqrt() * amp, 0.0);
    }
    finish(grid, coeffs)
}

/// Transverse factor `π^{−1/4} h^{−ε/4} e^{−y²/(2h^ε)} χ(y)` on T¹, with χ = 1 on `|y| < 1/4`
/// and χ = 0 on `|y| > 1/2`.
pub fn wunsch_transverse(eps: f64, h: f64) -> Result<Built> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidRecipe(format!("Wunsch exponent must lie in (0, 1), got {eps}")));
    }
    let width = h.powf(eps / 2.0);
    let samples = (((64.0 * PI / width) as usize).max(2048)).next_power_of_two();
    let pref = PI.powf(-0.25) * h.powf(-eps / 4.0);
    let f = |x: f64| {
        let y = centered_angle(x);
        pref * (-y * y / (2.0 * width * width)).exp() * plateau(y, 0.25, 0.5)
    };
    let coef = periodic_coefficients(f, samples);
    let mass: Vec<f64> = coef.iter().map(|c| c.1.norm_sqr()).collect();
    let n = tail_cut(&coef, &mass, TAIL_TOL * mass.iter().sum::<f64>()).max(4);
    let grid = FourierGrid::new(1, n, h)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (m, c) in coef {
        if let Some(idx) = grid.index(&[m]) {
            coeffs[idx] = c * (2.0 * PI).sqrt();
        }
    }
    finish(grid, coeffs)
}

/// `e^{ix₁/h}` times [`wunsch_transverse`] in `x₂`. `1/h` must be an integer.
pub fn wunsch(eps: f64, h: f64) -> Result<Built> {
    let inv = inverse_h(h)?;
    let t = wunsch_transverse(eps, h)?;
    let n = t.state.grid.radius();
    let grid = FourierGrid::centered(vec![inv, 0], n, h)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (i, c) in t.state.coeffs.iter().enumerate() {
        let m = t.state.grid.mode(i)[0];
        coeffs[grid.index(&[inv, m]).expect("row lies in the square")] = *c;
    }
    let state = FourierState::from_coeffs(grid, coeffs)?;
    Ok(Built { state, raw_norm: t.raw_norm * (2.0 * PI).sqrt() })
}

/// `W(x₂)`: equal to `x₂²/2` on `|x₂| ≤ 1/2`, constant on `|x₂| ≥ 1`, smooth and even.
pub fn wunsch_well(x: f64) -> f64 {
    let y = centered_angle(x).abs();
    if y <= 0.5 {
        return y * y / 2.0;
    }
    // W(y) = 1/8 + ∫_{1/2}^{min(y,1)} s·χ(s) ds, composite Simpson
    let top = y.min(1.0);
    let n = 2000;
    let step = (top - 0.5) / n as f64;
    let g = |s: f64| s * plateau(s, 0.5, 1.0);
    let mut acc = g(0.5) + g(top);
    for i in 1..n {
        let s = 0.5 + i as f64 * step;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(s);
    }
    0.125 + acc * step / 3.0
}

fn wunsch_well_coefficients() -> Vec<(i64, Complex64)> {
    let coef = periodic_coefficients(wunsch_well, 1024);
    let size: Vec<f64> = coef.iter().map(|c| c.1.norm()).collect();
    let band = tail_cut(&coef, &size, POTENTIAL_TOL * size.iter().sum::<f64>()) as i64;
    coef.into_iter()
        .filter(|c| c.0.abs() <= band)
        .map(|(m, c)| (m, Complex64::new(c.re, 0.0)))
        .collect()
}

/// The potential `V_h(x) = h^{−2ε} W(x₂)` as a trigonometric symbol, so that
/// `h² V_h = h^{2(1−ε)} W`.
pub fn wunsch_potential(eps: f64, h: f64) -> Result<TorusSymbol> {
    let scale = h.powf(-2.0 * eps);
    let terms: Vec<(Vec<i64>, Complex64)> =
        wunsch_well_coefficients().into_iter().map(|(m, c)| (vec![0, m], c * scale)).collect();
    TorusSymbol::trig(2, &terms)
}

/// [`wunsch_potential`] as a function of `x₂` alone, on T¹.
pub fn wunsch_transverse_potential(eps: f64, h: f64) -> Result<TorusSymbol> {
    let scale = h.powf(-2.0 * eps);
    let terms: Vec<(Vec<i64>, Complex64)> =
        wunsch_well_coefficients().into_iter().map(|(m, c)| (vec![m], c * scale)).collect();
    TorusSymbol::trig(1, &terms)
}

/// Gaussian wave packet at a degenerate critical point `ξ0` with width `ε`.
pub fn power_quasimode(xi0: &[f64], eps: f64, h: f64) -> Result<Built> {
    let profile = ProfileSpec::Gaussian;
    let grid = coherent_grid(xi0, eps, h, &profile)?;
    coherent_state(&vec![0.0; xi0.len()], xi0, eps, &profile, &grid)
}
