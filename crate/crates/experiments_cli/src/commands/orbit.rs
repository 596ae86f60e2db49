use crate::config::ExperimentConfig;
use crate::report::{loglog_slope, SweepReport};
use lattice_core::{Error, Result};
use limit_models::{orbit_measure_pairing, OrbitMeasureSpec};
use rayon::prelude::*;
use states::StateRecipe;
use torus_quantization::{for_each_sample, time_averaged_pairings, wigner_pairing};

fn coherent_data(recipe: &StateRecipe) -> Result<(Vec<f64>, Vec<f64>, states::PowerLaw)> {
    match recipe {
        StateRecipe::Coherent { x0, xi0, eps, .. } => Ok((x0.clone(), xi0.clone(), *eps)),
        _ => Err(Error::ConfigError("orbit convergence needs coherent initial data".into())),
    }
}

/// `e(h) = max_panel |time-averaged pairing − orbit-measure pairing|` per `h`, with the
/// log-log slope of `e` reported at the smallest `h`.
pub fn orbit_convergence(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let model = cfg.model()?;
    let (x0, xi0, eps) = coherent_data(cfg.state()?)?;
    let tau = cfg.tau_law()?;
    let h_min = *cfg.h_list.last().unwrap();
    let ratio = eps.eval(h_min) / (h_min * tau.eval(h_min));
    if ratio < cfg.orbit.min_scale_ratio {
        return Err(Error::ConfigError(format!(
            "ε_h/(hτ_h) = {ratio:.3} at h = {h_min} is below {}",
            cfg.orbit.min_scale_ratio
        )));
    }
    let spec = OrbitMeasureSpec::new(&model, &x0, &xi0, cfg.resonance.mode())?;
    let panel = cfg.section(&cfg.panel, "panel")?.build(&xi0)?;
    let symbols: Vec<_> = panel.iter().map(|p| p.1.clone()).collect();
    let window = cfg.window.build()?;
    let grad = model.gradient(&xi0)?;

    let per_h: Vec<Result<Vec<f64>>> = cfg
        .h_list
        .par_iter()
        .map(|&h| {
            let u = cfg.state()?.resolve(h, &model)?.state;
            let t_h = tau.eval(h);
            let pot = cfg.potential.build(u.dim(), h)?;
            if !cfg.orbit.pointwise {
                let got = time_averaged_pairings(&u, &symbols, &model, &pot, t_h, &window, cfg.dt.eval(h))?;
                return got
                    .iter()
                    .zip(&symbols)
                    .map(|(g, a)| Ok((g - orbit_measure_pairing(&spec, a)?).abs()))
                    .collect();
            }
            // moving Dirac mass at x0 + τ t dH(ξ0)
            let times: Vec<f64> = window.times();
            let scaled: Vec<f64> = times.iter().map(|t| t_h * t).collect();
            let mut dev = vec![0.0f64; symbols.len()];
            for_each_sample(&u, &model, &pot, &scaled, cfg.dt.eval(h), |i, v| {
                let x: Vec<f64> = x0.iter().zip(&grad).map(|(a, g)| a + scaled[i] * g).collect();
                for (d, a) in dev.iter_mut().zip(&symbols) {
                    *d = d.max((wigner_pairing(v, a)? - a.eval(&x, &xi0).re).abs());
                }
                Ok(())
            })?;
            Ok(dev)
        })
        .collect();

    let mut report = SweepReport::new("orbit-convergence");
    let mut e_series = Vec::new();
    for (&h, devs) in cfg.h_list.iter().zip(per_h) {
        let devs = devs?;
        let t_h = tau.eval(h);
        let e = devs.iter().fold(0.0f64, |m, v| m.max(*v));
        for ((name, _), d) in panel.iter().zip(&devs) {
            report.push(h, t_h, format!("dev[{name}]"), *d);
        }
        report.push(h, t_h, "e", e);
        report.push(h, t_h, "scale_ratio", eps.eval(h) / (h * t_h));
        e_series.push((h, e));
    }
    report.push(h_min, tau.eval(h_min), "loglog_slope", loglog_slope(&e_series));
    report.set_meta("lambda0", spec.lambda0.columns());
    report.set_meta("min_scale_ratio", cfg.orbit.min_scale_ratio);
    Ok(report)
}
