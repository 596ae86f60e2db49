use crate::config::ExperimentConfig;
use crate::report::{DensityOutput, SweepReport};
use lattice_core::{resonance_classify, Error, Gradient, Result};
use nalgebra::DVector;
use rayon::prelude::*;
use states::StateRecipe;
use std::f64::consts::PI;
use torus_quantization::{for_each_sample, sampled_density, DensityGrid};

/// Density of `n·x mod 2π` on `resolution` bins: the average of `grid` along the
/// hyperplanes orthogonal to `n`. Exact binning, since `n·x_j = 2π (n·j)/resolution`.
pub fn line_profile(grid: &DensityGrid, n: &[i64]) -> Vec<f64> {
    let r = grid.resolution as i64;
    let mut out = vec![0.0; grid.resolution];
    let mut idx = vec![0i64; grid.dim];
    for v in &grid.values {
        let s: i64 = idx.iter().zip(n).map(|(a, b)| a * b).sum();
        out[s.rem_euclid(r) as usize] += v;
        for i in (0..grid.dim).rev() {
            idx[i] += 1;
            if idx[i] < r {
                break;
            }
            idx[i] = 0;
        }
    }
    out
}

/// Circular distance in `[0, π]`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Peak of the `Λ0^⊥`-averaged density against `x0 + t d²H(ξ0)η0`, per `(h, t)`.
pub fn dirac_drift(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let model = cfg.model()?;
    let recipe = cfg.state()?;
    let StateRecipe::Modulated { x0, xi0, eta0, .. } = recipe else {
        return Err(Error::ConfigError("the drift experiment needs modulated coherent data".into()));
    };
    let sec = cfg.section(&cfg.drift, "drift")?;
    let (lambda0, _) = resonance_classify(&Gradient::Float(model.gradient(xi0)?), cfg.resonance.mode())?;
    let span_ok = lambda0.coords(eta0).is_ok() && (lambda0.rank() > 0 || eta0.iter().all(|v| *v == 0.0));
    if !span_ok {
        return Err(Error::ConfigError(format!("η0 = {eta0:?} is not in the span of Λ_ξ0 = {:?}", lambda0.columns())));
    }
    if lambda0.rank() != 1 {
        return Err(Error::ConfigError(format!("the peak is tracked for rank-one Λ_ξ0 only, got rank {}", lambda0.rank())));
    }
    let n = lambda0.columns()[0].clone();
    let hess = model.hessian(xi0)?;
    let v = &hess * DVector::from_column_slice(eta0);
    let tau = cfg.tau_law()?;
    let mut times = sec.times.clone();
    times.sort_by(f64::total_cmp);
    let res = sec.resolution;
    let cell = 2.0 * PI / res as f64;

    type Sample = (f64, f64, f64, Option<DensityGrid>);
    let per_h: Vec<Result<Vec<Sample>>> = cfg
        .h_list
        .par_iter()
        .map(|&h| {
            let u = recipe.resolve(h, &model)?.state;
            let pot = cfg.potential.build(u.dim(), h)?;
            let t_h = tau.eval(h);
            let scaled: Vec<f64> = times.iter().map(|t| t_h * t).collect();
            let mut out = Vec::new();
            for_each_sample(&u, &model, &pot, &scaled, cfg.dt.eval(h), |i, w| {
                let g = sampled_density(w, res)?;
                let prof = line_profile(&g, &n);
                let peak = prof.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (j, &p)| if p > b.1 { (j, p) } else { b }).0;
                let peak_x = peak as f64 * cell;
                let target: f64 = (0..n.len()).map(|j| n[j] as f64 * (x0[j] + times[i] * v[j])).sum();
                let target = target.rem_euclid(2.0 * PI);
                out.push((peak_x, target, circle_distance(peak_x, target), cfg.write_densities.then_some(g)));
                Ok(())
            })?;
            Ok(out)
        })
        .collect();

    let mut report = SweepReport::new("dirac-drift");
    for (&h, rows) in cfg.h_list.iter().zip(per_h) {
        let t_h = tau.eval(h);
        for (t, (peak, target, dist, g)) in times.iter().zip(rows?) {
            report.push(h, t_h, format!("peak[t={t}]"), peak);
            report.push(h, t_h, format!("predicted[t={t}]"), target);
            report.push(h, t_h, format!("distance_cells[t={t}]"), dist / cell);
            if let Some(grid) = g {
                report.densities.push(DensityOutput { h, t: *t, grid });
            }
        }
    }
    report.set_meta("lambda0", lambda0.columns());
    report.set_meta("resolution", res);
    report.set_meta("cell", cell);
    Ok(report)
}
