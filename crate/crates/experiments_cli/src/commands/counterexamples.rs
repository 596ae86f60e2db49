use super::threshold::averaged_density;
use crate::config::{CounterexampleCase, ExperimentConfig};
use crate::report::SweepReport;
use hamiltonians::HamiltonianModel;
use lattice_core::{Error, Result};
use states::{centered_angle, lagrangian_diag, power_quasimode, wunsch_transverse, wunsch_transverse_potential, ProfileSpec};
use torus_quantization::{for_each_sample, slab_mass, PotentialSpec};

/// Mass of `grid` in the torus ball `|x| < radius`.
fn ball_mass(grid: &torus_quantization::DensityGrid, radius: f64) -> f64 {
    (0..grid.values.len())
        .filter(|&i| grid.point(i).iter().map(|x| centered_angle(*x).powi(2)).sum::<f64>() < radius * radius)
        .map(|i| grid.values[i])
        .sum::<f64>()
        * grid.cell_volume()
}

fn case_name(c: &CounterexampleCase) -> &'static str {
    match c {
        CounterexampleCase::PowerQuasimode { .. } => "power_quasimode",
        CounterexampleCase::Wunsch { .. } => "wunsch",
        CounterexampleCase::SaddleDiagonal { .. } => "saddle_diagonal",
    }
}

/// Time-averaged mass near the predicted singular support, per case and `h`.
pub fn counterexamples(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let sec = cfg.section(&cfg.counterexamples, "counterexamples")?;
    let window = cfg.window.build()?;
    let mut report = SweepReport::new("counterexamples");
    for case in &sec.cases {
        let name = case_name(case);
        for &h in &cfg.h_list {
            let (tau, mass) = match case {
                CounterexampleCase::PowerQuasimode { xi0, eps, tau, radius, resolution } => {
                    let model = cfg.model()?;
                    if !matches!(model, HamiltonianModel::Power { alpha } if alpha > 2.0) {
                        return Err(Error::ConfigError("the quasimode case needs H = |ξ|^α with α > 2".into()));
                    }
                    if xi0.iter().any(|v| *v != 0.0) {
                        return Err(Error::ConfigError("the quasimode sits at the degenerate point ξ0 = 0".into()));
                    }
                    let u = power_quasimode(xi0, eps.eval(h), h)?.state;
                    let t_h = tau.eval(h);
                    let g = averaged_density(&u, &model, &PotentialSpec::Zero, t_h, &window, 1.0, *resolution)?;
                    (t_h, ball_mass(&g, *radius))
                }
                CounterexampleCase::Wunsch { eps, tau, radius, dt } => {
                    let model = HamiltonianModel::quadratic_identity(1, 2);
                    let built = wunsch_transverse(*eps, h)?.state;
                    let grid = built.grid.with_radius(2 * built.grid.radius())?;
                    let (u, _) = built.regrid(&grid)?;
                    let pot = PotentialSpec::multiplication(wunsch_transverse_potential(*eps, h)?);
                    let t_h = tau.eval(h);
                    let times: Vec<f64> = window.times().iter().map(|t| t_h * t).collect();
                    let w = window.weights();
                    let mut acc = 0.0;
                    for_each_sample(&u, &model, &pot, &times, dt.eval(h), |i, v| {
                        acc += w[i] * slab_mass(v, &[1], 0.0, *radius)?;
                        Ok(())
                    })?;
                    (t_h, acc)
                }
                CounterexampleCase::SaddleDiagonal { radius } => {
                    let u = lagrangian_diag(&ProfileSpec::default(), h)?.state;
                    (1.0, slab_mass(&u, &[1, -1], 0.0, *radius)?)
                }
            };
            report.push(h, tau, format!("mass[{name}]"), mass);
        }
    }
    report.set_meta("window", [window.start, window.end]);
    Ok(report)
}
