use crate::config::ExperimentConfig;
use crate::report::SweepReport;
use lattice_core::Result;
use rayon::prelude::*;
use states::PowerLaw;
use std::f64::consts::PI;
use torus_quantization::{for_each_sample, sampled_density, DensityGrid, TimeWindow};

/// Trapezoid time average of `|S_h^{τt}u|²` sampled at `resolution` points per axis.
pub fn averaged_density(
    u: &torus_quantization::FourierState,
    model: &hamiltonians::HamiltonianModel,
    potential: &torus_quantization::PotentialSpec,
    tau: f64,
    window: &TimeWindow,
    dt: f64,
    resolution: usize,
) -> Result<DensityGrid> {
    let times: Vec<f64> = window.times().iter().map(|t| tau * t).collect();
    let w = window.weights();
    let mut acc = DensityGrid { dim: u.dim(), resolution, values: vec![0.0; resolution.pow(u.dim() as u32)] };
    for_each_sample(u, model, potential, &times, dt, |i, v| {
        let g = sampled_density(v, resolution)?;
        for (a, b) in acc.values.iter_mut().zip(&g.values) {
            *a += w[i] * b;
        }
        Ok(())
    })?;
    Ok(acc)
}

/// `κ = (2π)^d max ν̄` and `‖ν̄‖_{L²}` of the time-averaged density, per `(h, β)`.
pub fn threshold_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let model = cfg.model()?;
    let recipe = cfg.state()?;
    let window = cfg.window.build()?;
    let res = cfg.threshold.resolution;
    let tasks: Vec<(f64, f64)> =
        cfg.h_list.iter().flat_map(|&h| cfg.threshold.betas.iter().map(move |&b| (h, b))).collect();
    let out: Vec<Result<(f64, f64, DensityGrid)>> = tasks
        .par_iter()
        .map(|&(h, beta)| {
            let u = recipe.resolve(h, &model)?.state;
            let pot = cfg.potential.build(u.dim(), h)?;
            let tau = PowerLaw::new(1.0, -beta).eval(h);
            let g = averaged_density(&u, &model, &pot, tau, &window, cfg.dt.eval(h), res)?;
            let d = g.dim as i32;
            let kappa = (2.0 * PI).powi(d) * g.values.iter().fold(0.0f64, |m, v| m.max(*v));
            let l2 = (g.values.iter().map(|v| v * v).sum::<f64>() * g.cell_volume()).sqrt();
            Ok((kappa, l2, g))
        })
        .collect();

    let mut report = SweepReport::new("threshold-sweep");
    for (&(h, beta), r) in tasks.iter().zip(out) {
        let (kappa, l2, _) = r?;
        let tau = PowerLaw::new(1.0, -beta).eval(h);
        report.push(h, tau, format!("kappa[beta={beta}]"), kappa);
        report.push(h, tau, format!("l2[beta={beta}]"), l2);
    }
    let (h0, h1) = (cfg.h_list[0], *cfg.h_list.last().unwrap());
    for &beta in &cfg.threshold.betas {
        let k = |h| report.value(h, &format!("kappa[beta={beta}]")).unwrap_or(f64::NAN);
        let ratio = k(h1) / k(h0);
        report.push(h1, PowerLaw::new(1.0, -beta).eval(h1), format!("kappa_ratio[beta={beta}]"), ratio);
    }
    report.set_meta("resolution", res);
    report.set_meta("betas", &cfg.threshold.betas);
    Ok(report)
}
