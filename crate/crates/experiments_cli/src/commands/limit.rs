use crate::config::{lattice, ExperimentConfig, LimitSection};
use crate::report::SweepReport;
use hamiltonians::HamiltonianModel;
use lattice_core::{Error, Result, SubmoduleBasis};
use limit_models::{dominant_atom, extract_atoms, BlochEvolution};
use num_complex::Complex64;
use rayon::prelude::*;
use states::{plateau, StateRecipe};
use std::sync::Arc;
use torus_quantization::{perturbed_propagate, time_averaged_pairings, ModeFn, TorusSymbol};
use wigner_measures::{chi, kh_transform, two_micro_pairing, ChartF, MWindow, TwoMicroSymbol};

fn envelope(center: Vec<f64>, support: f64) -> impl Fn(&[f64]) -> f64 + Clone + Send + Sync + 'static {
    move |xi: &[f64]| {
        let r = xi.iter().zip(&center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        (-r * r / 2.0).exp() * plateau(r, 0.75 * support, support)
    }
}

/// `cos(m·x) g(ξ) ψ(η)` with `ψ(η) = exp(−|η|²/(2w²))`, for `m ∈ Λ`.
pub fn limit_panel_symbol(lambda: &SubmoduleBasis, m: &[i64], xi0: &[f64], sec: &LimitSection) -> Result<TwoMicroSymbol> {
    let w = sec.eta_width;
    let neg: Vec<i64> = m.iter().map(|v| -v).collect();
    let terms = if m.iter().all(|v| *v == 0) {
        vec![(m.to_vec(), Complex64::new(1.0, 0.0))]
    } else {
        vec![(m.to_vec(), Complex64::new(0.5, 0.0)), (neg, Complex64::new(0.5, 0.0))]
    };
    let psi = move |eta: &[f64]| (-eta.iter().map(|v| v * v).sum::<f64>() / (2.0 * w * w)).exp();
    TwoMicroSymbol::separable(lambda, &terms, envelope(xi0.to_vec(), sec.support_radius), psi, |_| 0.0, 12.0 * w, xi0, sec.support_radius)
}

/// Substituted compact symbol `cos(m·x) g(ξ) ψ(τη(ξ)) χ(τη(ξ)/R)` for an arbitrary x-mode `m`.
fn outside_compact_symbol(m: &[i64], xi0: &[f64], chart: &ChartF, tau: f64, sec: &LimitSection) -> Result<TorusSymbol> {
    let (g, w, r) = (envelope(xi0.to_vec(), sec.support_radius), sec.eta_width, sec.cutoff);
    let chart = Arc::new(chart.clone());
    let f: ModeFn = Arc::new(move |xi: &[f64]| {
        let gv = g(xi);
        if gv == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let Ok((_, eta)) = chart.decompose(xi) else { return Complex64::new(0.0, 0.0) };
        let te: Vec<f64> = eta.iter().map(|v| tau * v).collect();
        let scaled: Vec<f64> = te.iter().map(|v| v / r).collect();
        let psi = (-te.iter().map(|v| v * v).sum::<f64>() / (2.0 * w * w)).exp();
        Complex64::new(0.5 * gv * psi * chi(&scaled), 0.0)
    });
    let neg: Vec<i64> = m.iter().map(|v| -v).collect();
    TorusSymbol::from_fns(m.len(), vec![(m.to_vec(), f.clone()), (neg, f)])
}

fn fmt_mode(m: &[i64]) -> String {
    format!("{m:?}").replace(' ', "")
}

/// Two-micro compact pairing of the full evolution against `Σ_atoms w Tr(a_σ M(t))`.
/// Modes outside `Λ` are reported as window time averages of the compact part.
pub fn limit_compare(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let model = cfg.model()?;
    let sec = cfg.section(&cfg.limit, "limit")?;
    let StateRecipe::Coherent { xi0, .. } = cfg.state()? else {
        return Err(Error::ConfigError("limit comparison needs coherent initial data".into()));
    };
    let tau = cfg.tau_law()?;
    if tau.exponent != -1.0 {
        return Err(Error::ConfigError(format!("limit comparison runs at τ_h = c/h, got {tau}")));
    }
    let d = xi0.len();
    let lambda = lattice(d, &sec.lambda)?;
    let chart = ChartF::new(&model, xi0, &lambda, sec.chart_radius)?;
    let chart = if matches!(model, HamiltonianModel::Quadratic { .. }) { chart } else { chart.with_newton() };
    let (inside, outside): (Vec<Vec<i64>>, Vec<Vec<i64>>) = sec.modes.iter().cloned().partition(|m| lambda.contains_i64(m));
    let panel: Vec<TwoMicroSymbol> =
        inside.iter().map(|m| limit_panel_symbol(&lambda, m, xi0, sec)).collect::<Result<_>>()?;
    let mut times = sec.times.clone();
    times.sort_by(f64::total_cmp);
    let window = cfg.window.build()?;

    struct HRow {
        share: f64,
        atoms: usize,
        dropped: f64,
        compact: Vec<Vec<f64>>,
        limit: Vec<Vec<f64>>,
        outside: Vec<f64>,
    }

    let per_h: Vec<Result<HRow>> = cfg
        .h_list
        .par_iter()
        .map(|&h| {
            let built = cfg.state()?.resolve(h, &model)?.state;
            let grid = built.grid.with_radius(built.grid.radius() + sec.pad)?;
            let (u0, _) = built.regrid(&grid)?;
            let pot = cfg.potential.build(d, h)?;
            let t_h = tau.eval(h);
            let m = MWindow::for_chart(&chart);
            let field = kh_transform(&u0, &chart, &m)?;
            let dom = dominant_atom(&field, sec.window_radius)?;
            let total: f64 = field.plancherel_mass();
            let atoms = extract_atoms(&field, sec.window_radius)?;
            let evs: Vec<BlochEvolution> =
                atoms.iter().map(|a| BlochEvolution::new(&a.m0.space, &model, &a.sigma, &pot)).collect::<Result<_>>()?;
            let mut row = HRow {
                share: dom.weight / total,
                atoms: atoms.len(),
                dropped: atoms.iter().map(|a| a.dropped).sum(),
                compact: Vec::new(),
                limit: Vec::new(),
                outside: Vec::new(),
            };
            let outside_syms: Vec<TorusSymbol> =
                outside.iter().map(|m| outside_compact_symbol(m, xi0, &chart, t_h, sec)).collect::<Result<_>>()?;
            if !outside_syms.is_empty() {
                row.outside = time_averaged_pairings(&u0, &outside_syms, &model, &pot, t_h, &window, cfg.dt.eval(h))?;
            }
            let mut u = u0.clone();
            let mut now = 0.0;
            for &t in &times {
                u = perturbed_propagate(&u, t_h * (t - now), &model, &pot, cfg.dt.eval(h))?;
                now = t;
                let mut c_row = Vec::new();
                let mut l_row = Vec::new();
                for a in &panel {
                    c_row.push(two_micro_pairing(&u, a, &chart, t_h, sec.cutoff, 1.0)?.0);
                    let mut lim = Complex64::new(0.0, 0.0);
                    for (atom, ev) in atoms.iter().zip(&evs) {
                        let mt = ev.conjugate(&atom.m0, t)?;
                        let b = atom.m0.space.two_micro_matrix(a, &atom.sigma, Some(sec.cutoff))?;
                        lim += mt.pair(&b)? * atom.weight;
                    }
                    l_row.push(lim.re);
                }
                row.compact.push(c_row);
                row.limit.push(l_row);
            }
            Ok(row)
        })
        .collect();

    let mut report = SweepReport::new("limit-compare");
    for (&h, row) in cfg.h_list.iter().zip(per_h) {
        let row = row?;
        let t_h = tau.eval(h);
        report.push(h, t_h, "dominant_share", row.share);
        report.push(h, t_h, "atoms", row.atoms as f64);
        report.push(h, t_h, "window_dropped", row.dropped);
        for (ti, t) in times.iter().enumerate() {
            let mut worst = 0.0f64;
            for (mi, m) in inside.iter().enumerate() {
                let (c, l) = (row.compact[ti][mi], row.limit[ti][mi]);
                let dev = (c - l).abs() / l.abs();
                worst = worst.max(dev);
                let tag = format!("{}][t={t}", fmt_mode(m));
                report.push(h, t_h, format!("compact[{tag}]"), c);
                report.push(h, t_h, format!("limit[{tag}]"), l);
                report.push(h, t_h, format!("deviation[{tag}]"), dev);
            }
            report.push(h, t_h, format!("max_deviation[t={t}]"), worst);
        }
        for (m, v) in outside.iter().zip(&row.outside) {
            report.push(h, t_h, format!("outside_average[{}]", fmt_mode(m)), *v);
        }
    }
    report.set_meta("lambda", lambda.columns());
    report.set_meta("window_radius", sec.window_radius);
    report.set_meta("cutoff", sec.cutoff);
    report.set_meta("dominant_fraction", limit_models::DOMINANT_FRACTION);
    Ok(report)
}
