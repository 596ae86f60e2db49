use crate::config::{BoxSpec, ExperimentConfig, ObservabilitySection};
use crate::report::SweepReport;
use hamiltonians::{classify_point, HamiltonianModel};
use lattice_core::{Error, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use states::plateau;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use torus_quantization::{FourierGrid, FourierState};

/// Radial bump: one on `B(c, r/2)`, zero outside `B(c, r)`.
pub fn chi_window(sec: &ObservabilitySection, xi: &[f64]) -> f64 {
    let r = xi.iter().zip(&sec.chi_center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    plateau(r, 0.5 * sec.chi_radius, sec.chi_radius)
}

fn full(range: &[f64; 2]) -> bool {
    range[1] - range[0] >= 2.0 * PI
}

/// `(1/2π) ∫_lo^hi e^{iqx} dx`.
fn interval_kernel(range: &[f64; 2], q: i64) -> Complex64 {
    if full(range) {
        return Complex64::new(if q == 0 { 1.0 } else { 0.0 }, 0.0);
    }
    if q == 0 {
        return Complex64::new((range[1] - range[0]) / (2.0 * PI), 0.0);
    }
    let qf = q as f64;
    (Complex64::from_polar(1.0, qf * range[1]) - Complex64::from_polar(1.0, qf * range[0])) / Complex64::new(0.0, 2.0 * PI * qf)
}

/// `∫_0^T e^{iωt} dt`.
fn time_kernel(omega: f64, horizon: f64) -> Complex64 {
    if (omega * horizon).abs() < 1e-12 {
        return Complex64::new(horizon, 0.0);
    }
    (Complex64::from_polar(1.0, omega * horizon) - 1.0) / Complex64::new(0.0, omega)
}

/// The Hermitian form `c ↦ ∫_0^T ∫_U |S_h^{t/h} u_c|² dx dt` on a fixed mode set, split
/// into blocks of modes sharing their coordinates on the axes every box covers fully.
pub struct ObservationForm {
    blocks: Vec<(Vec<usize>, Vec<Complex64>)>,
}

impl ObservationForm {
    pub fn new(modes: &[Vec<i64>], energies: &[f64], h: f64, boxes: &[BoxSpec], horizon: f64) -> Result<Self> {
        let d = modes.first().map_or(0, |m| m.len());
        if boxes.iter().any(|b| b.ranges.len() != d) {
            return Err(Error::ConfigError("box dimension differs from the torus dimension".into()));
        }
        let full_axes: Vec<usize> = (0..d).filter(|&j| boxes.iter().all(|b| full(&b.ranges[j]))).collect();
        let mut groups: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for (i, m) in modes.iter().enumerate() {
            groups.entry(full_axes.iter().map(|&j| m[j]).collect()).or_default().push(i);
        }
        let blocks = groups
            .into_values()
            .map(|idx| {
                let n = idx.len();
                let mut q = vec![Complex64::new(0.0, 0.0); n * n];
                for (a, &ia) in idx.iter().enumerate() {
                    for (b, &ib) in idx.iter().enumerate() {
                        let mut s = Complex64::new(0.0, 0.0);
                        for bx in boxes {
                            let mut p = Complex64::new(1.0, 0.0);
                            for j in 0..d {
                                if !full_axes.contains(&j) {
                                    p *= interval_kernel(&bx.ranges[j], modes[ib][j] - modes[ia][j]);
                                }
                            }
                            s += p;
                        }
                        q[a * n + b] = s * time_kernel((energies[ia] - energies[ib]) / (h * h), horizon);
                    }
                }
                (idx, q)
            })
            .collect();
        Ok(ObservationForm { blocks })
    }

    pub fn eval(&self, c: &[Complex64]) -> f64 {
        let mut total = 0.0;
        for (idx, q) in &self.blocks {
            let n = idx.len();
            for (a, &ia) in idx.iter().enumerate() {
                let mut row = Complex64::new(0.0, 0.0);
                for (b, &ib) in idx.iter().enumerate() {
                    row += q[a * n + b] * c[ib];
                }
                total += (c[ia].conj() * row).re;
            }
        }
        total
    }

    /// Diagonal entry of mode `i`: the form on the plane wave `e^{ik_i·x}`.
    pub fn diagonal(&self, i: usize) -> f64 {
        for (idx, q) in &self.blocks {
            if let Some(a) = idx.iter().position(|&j| j == i) {
                return q[a * idx.len() + a].re;
            }
        }
        0.0
    }
}

/// The χ-window modes at `h`: a grid around `χ`'s support and the indices where `χ(hk) > 0`.
fn window_modes(sec: &ObservabilitySection, h: f64) -> Result<(FourierGrid, Vec<usize>)> {
    let center: Vec<i64> = sec.chi_center.iter().map(|c| (c / h).round() as i64).collect();
    let grid = FourierGrid::centered(center, (sec.chi_radius / h).ceil() as usize + 1, h)?;
    let keep = (0..grid.len())
        .filter(|&i| {
            let xi: Vec<f64> = grid.mode(i).iter().map(|k| h * *k as f64).collect();
            chi_window(sec, &xi) > 0.0
        })
        .collect();
    Ok((grid, keep))
}

fn check_support(model: &HamiltonianModel, sec: &ObservabilitySection) -> Result<()> {
    let d = sec.chi_center.len();
    let steps = 8i64;
    let mut idx = vec![-steps; d];
    loop {
        let xi: Vec<f64> =
            idx.iter().zip(&sec.chi_center).map(|(k, c)| c + sec.chi_radius * *k as f64 / steps as f64).collect();
        if chi_window(sec, &xi) > 0.0 && classify_point(model, &xi, 1e-9)?.in_ch {
            return Err(Error::ConfigError(format!("supp χ meets C_H at ξ = {xi:?}")));
        }
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if idx[i] < steps {
                idx[i] += 1;
                break;
            }
            idx[i] = -steps;
        }
    }
}

/// `Ĉ(h) = max ‖χ(hD)u‖² / ∫_0^T ∫_U |S_h^{t/h}χ(hD)u|²` over a seeded ensemble.
pub fn observability(cfg: &ExperimentConfig, seed: u64) -> Result<SweepReport> {
    let model = cfg.model()?;
    let sec = cfg.section(&cfg.observability, "observability")?;
    if !(sec.horizon > 0.0) {
        return Err(Error::ConfigError("observation time must be positive".into()));
    }
    check_support(&model, sec)?;
    let per_h: Vec<Result<(f64, f64, f64, usize)>> = cfg
        .h_list
        .par_iter()
        .enumerate()
        .map(|(hi, &h)| {
            let (grid, keep) = window_modes(sec, h)?;
            if keep.is_empty() {
                return Err(Error::EmptyCluster(format!("no grid mode in supp χ at h = {h}")));
            }
            let modes: Vec<Vec<i64>> = keep.iter().map(|&i| grid.mode(i)).collect();
            let weights: Vec<f64> = modes
                .iter()
                .map(|k| chi_window(sec, &k.iter().map(|v| h * *v as f64).collect::<Vec<_>>()))
                .collect();
            let energies: Vec<f64> =
                modes.iter().map(|k| model.energy(&k.iter().map(|v| h * *v as f64).collect::<Vec<_>>())).collect();
            let form = ObservationForm::new(&modes, &energies, h, &sec.boxes, sec.horizon)?;
            let ratio = |c: &[Complex64]| {
                let num: f64 = c.iter().map(|v| v.norm_sqr()).sum();
                num / form.eval(c)
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(hi as u64));
            let mut best_random = 0.0f64;
            for _ in 0..sec.draws {
                let c: Vec<Complex64> = weights
                    .iter()
                    .map(|w| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex64::new(re, im) * *w
                    })
                    .collect();
                best_random = best_random.max(ratio(&c));
            }
            let mut best_plane = 0.0f64;
            if sec.plane_waves {
                for i in 0..modes.len() {
                    best_plane = best_plane.max(1.0 / form.diagonal(i));
                }
            }
            let mut best_adv = 0.0f64;
            for recipe in &sec.adversarial {
                let u = recipe.resolve(h, &model)?.state;
                let c: Vec<Complex64> = modes.iter().zip(&weights).map(|(k, w)| u.get(k) * *w).collect();
                if c.iter().any(|v| v.norm_sqr() > 0.0) {
                    best_adv = best_adv.max(ratio(&c));
                }
            }
            Ok((best_random, best_plane, best_adv, modes.len()))
        })
        .collect();

    let mut report = SweepReport::new("observability");
    for (&h, r) in cfg.h_list.iter().zip(per_h) {
        let (rand_c, plane_c, adv_c, n) = r?;
        let tau = 1.0 / h;
        report.push(h, tau, "C_hat", rand_c.max(plane_c).max(adv_c));
        report.push(h, tau, "C_hat_random", rand_c);
        if sec.plane_waves {
            report.push(h, tau, "C_hat_plane", plane_c);
        }
        if !sec.adversarial.is_empty() {
            report.push(h, tau, "C_hat_adversarial", adv_c);
        }
        report.push(h, tau, "modes", n as f64);
    }
    let c: Vec<f64> = report.series("C_hat").iter().map(|p| p.1).collect();
    let (lo, hi) = c.iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    let h1 = *cfg.h_list.last().unwrap();
    report.push(h1, 1.0 / h1, "C_hat_max_over_min", hi / lo);
    report.set_meta("seed", seed);
    report.set_meta("draws", sec.draws);
    report.set_meta("horizon", sec.horizon);
    Ok(report)
}

/// Convenience for tests: the observation ratio of one state on the χ-window.
pub fn observation_ratio(model: &HamiltonianModel, sec: &ObservabilitySection, u: &FourierState) -> Result<f64> {
    let h = u.h();
    let (grid, keep) = window_modes(sec, h)?;
    let modes: Vec<Vec<i64>> = keep.iter().map(|&i| grid.mode(i)).collect();
    let energies: Vec<f64> =
        modes.iter().map(|k| model.energy(&k.iter().map(|v| h * *v as f64).collect::<Vec<_>>())).collect();
    let form = ObservationForm::new(&modes, &energies, h, &sec.boxes, sec.horizon)?;
    let c: Vec<Complex64> = modes
        .iter()
        .map(|k| u.get(k) * chi_window(sec, &k.iter().map(|v| h * *v as f64).collect::<Vec<_>>()))
        .collect();
    Ok(c.iter().map(|v| v.norm_sqr()).sum::<f64>() / form.eval(&c))
}
