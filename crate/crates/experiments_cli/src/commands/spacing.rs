use crate::config::ExperimentConfig;
use crate::report::SweepReport;
use lattice_core::{Error, Result};
use states::{eigenfunction_cluster, LEVEL_TOL};
use torus_quantization::{time_averaged_pairing, wigner_pairing, FourierGrid, PotentialSpec, TimeWindow};

/// Distinct values of `H(hk)` in the open window, sorted, merged within `LEVEL_TOL` relative.
pub fn levels(grid: &FourierGrid, model: &hamiltonians::HamiltonianModel, window: [f64; 2]) -> Vec<f64> {
    let h = grid.h();
    let mut e: Vec<f64> = (0..grid.len())
        .map(|i| model.energy(&grid.mode(i).iter().map(|k| h * *k as f64).collect::<Vec<_>>()))
        .filter(|v| *v > window[0] && *v < window[1])
        .collect();
    e.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for v in e {
        match out.last() {
            Some(&last) if (v - last).abs() <= LEVEL_TOL * last.abs().max(1.0) => {}
            _ => out.push(v),
        }
    }
    out
}

/// `τ_h^H(O) = h / min spacing` of the levels in `O`, plus cluster time-average checks.
pub fn spacing(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let model = cfg.model()?;
    let sec = cfg.section(&cfg.spacing, "spacing")?;
    let d = model.dim().ok_or_else(|| Error::ConfigError("spacing needs a model of fixed dimension".into()))?;
    let mut report = SweepReport::new("spacing");
    for &h in &cfg.h_list {
        let grid = FourierGrid::new(d, sec.radius, h)?;
        let lv = levels(&grid, &model, sec.energy_window);
        if lv.len() < 2 {
            return Err(Error::EmptyCluster(format!("fewer than two levels in {:?} at h = {h}", sec.energy_window)));
        }
        let gap = lv.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let tau_h = h / gap;
        report.push(h, tau_h, "levels", lv.len() as f64);
        report.push(h, tau_h, "min_spacing", gap);
        report.push(h, tau_h, "tau_H", tau_h);
        if let Some(e) = sec.cluster_energy {
            let u = eigenfunction_cluster(e, &grid, &model, None, LEVEL_TOL)?;
            let panel = cfg.section(&cfg.panel, "panel")?.build(&vec![0.0; d])?;
            let mut worst = 0.0f64;
            for scale in [10.0, 100.0] {
                let window = TimeWindow::new(0.0, 1.0, 64)?;
                for (name, a) in &panel {
                    let stat = wigner_pairing(&u, a)?;
                    let avg = time_averaged_pairing(&u, a, &model, &PotentialSpec::Zero, scale * tau_h, &window, 1.0)?;
                    worst = worst.max((avg - stat).abs());
                    if scale == 10.0 {
                        report.push(h, tau_h, format!("static[{name}]"), stat);
                    }
                }
            }
            report.push(h, tau_h, "cluster_average_defect", worst);
        }
    }
    report.set_meta("energy_window", sec.energy_window);
    report.set_meta("level_tol", LEVEL_TOL);
    Ok(report)
}
