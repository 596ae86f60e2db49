use crate::config::{lattice, ExperimentConfig, FlowCheck, KhCheck};
use crate::report::SweepReport;
use hamiltonians::HamiltonianModel;
use lattice_core::{Error, Result, SubmoduleBasis};
use limit_models::{two_micro_flow_pullback, Flow};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use states::{plateau, StateRecipe};
use torus_quantization::{perturbed_propagate, time_averaged_pairings, wigner_pairing, FourierGrid, FourierState};
use wigner_measures::{kh_transform, substituted_symbol, ChartF, CutoffPart, MWindow, Scales, TwoMicroSymbol};

fn chart_for(model: &HamiltonianModel, xi0: &[f64], lambda: &SubmoduleBasis, radius: f64) -> Result<ChartF> {
    let chart = ChartF::new(model, xi0, lambda, radius)?;
    Ok(if matches!(model, HamiltonianModel::Quadratic { .. }) { chart } else { chart.with_newton() })
}

/// Complex Gaussian coefficients on `grid`, normalized.
pub fn random_state(grid: &FourierGrid, seed: u64) -> Result<FourierState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..grid.len())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    let mut u = FourierState::from_coeffs(grid.clone(), coeffs)?;
    u.normalize()?;
    Ok(u)
}

/// `(plancherel, bloch, rebuild)` worst errors over the random ensemble at `h`.
fn kh_errors(model: &HamiltonianModel, sec: &KhCheck, h: f64, seed: u64) -> Result<(f64, f64, f64)> {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for (ci, case) in sec.cases.iter().enumerate() {
        let lambda = lattice(case.center.len(), &case.lambda)?;
        let chart = chart_for(model, &case.center, &lambda, sec.chart_radius)?;
        let m = MWindow::for_chart(&chart);
        let center: Vec<i64> = case.center.iter().map(|v| (v / h).round() as i64).collect();
        let grid = FourierGrid::centered(center, (0.5 * sec.chart_radius / h).ceil() as usize + 1, h)?;
        for s in 0..sec.states {
            let u = random_state(&grid, seed.wrapping_add((ci * sec.states + s) as u64))?;
            let field = kh_transform(&u, &chart, &m)?;
            let windowed: Vec<Complex64> = (0..grid.len())
                .map(|i| {
                    let xi: Vec<f64> = grid.mode(i).iter().map(|k| h * *k as f64).collect();
                    u.coeffs[i] * m.eval(&xi)
                })
                .collect();
            let lhs: f64 = windowed.iter().map(|c| c.norm_sqr()).sum();
            worst.0 = worst.0.max((field.plancherel_mass() - lhs).abs() / lhs);
            worst.1 = worst.1.max(field.bloch_defect()?);
            let back = field.to_state(&grid)?;
            let err = back.coeffs.iter().zip(&windowed).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            worst.2 = worst.2.max(err);
        }
    }
    Ok(worst)
}

/// `cos(m·x) g(ξ) ψ(η)` with `g` a Gaussian cut off at the support radius.
pub fn flow_symbol(lambda: &SubmoduleBasis, xi0: &[f64], sec: &FlowCheck) -> Result<TwoMicroSymbol> {
    let m = &sec.mode;
    let neg: Vec<i64> = m.iter().map(|v| -v).collect();
    let terms = vec![(m.clone(), Complex64::new(0.5, 0.0)), (neg, Complex64::new(0.5, 0.0))];
    let (c, s) = (xi0.to_vec(), sec.support_radius);
    let g = move |xi: &[f64]| {
        let r = xi.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        (-r * r / 2.0).exp() * plateau(r, 0.75 * s, s)
    };
    match sec.eta_width {
        Some(w) => {
            let psi = move |eta: &[f64]| (-eta.iter().map(|v| v * v).sum::<f64>() / (2.0 * w * w)).exp();
            TwoMicroSymbol::separable(lambda, &terms, g, psi, |_| 0.0, 12.0 * w, xi0, s)
        }
        None => TwoMicroSymbol::separable(lambda, &terms, g, |_| 1.0, |_| 1.0, 1.0, xi0, s),
    }
}

fn flow_setup(cfg: &ExperimentConfig, sec: &FlowCheck) -> Result<(HamiltonianModel, Vec<f64>, ChartF, TwoMicroSymbol)> {
    let model = cfg.model()?;
    let xi0 = match cfg.state()? {
        StateRecipe::Coherent { xi0, .. } | StateRecipe::Modulated { xi0, .. } => xi0.clone(),
        _ => return Err(Error::ConfigError("flow checks need coherent or modulated data".into())),
    };
    let lambda = lattice(xi0.len(), &sec.lambda)?;
    let chart = chart_for(&model, &xi0, &lambda, sec.chart_radius)?;
    let a = flow_symbol(&lambda, &xi0, sec)?;
    Ok((model, xi0, chart, a))
}

/// `|⟨sphere(a∘φ¹_s)⟩ − ⟨sphere(a)⟩|` for the time-averaged Wigner distribution, per `s`.
fn invariance_defects(cfg: &ExperimentConfig, sec: &FlowCheck, h: f64) -> Result<Vec<f64>> {
    let (model, _, chart, a) = flow_setup(cfg, sec)?;
    let t_h = cfg.tau_law()?.eval(h);
    let scales = Scales { tau: t_h, r: sec.cutoff, delta: sec.delta };
    let mut symbols = vec![substituted_symbol(&a, &chart, CutoffPart::Sphere, scales)?];
    for &s in &sec.times {
        let b = two_micro_flow_pullback(&a, &chart, Flow::Phi1 { s })?;
        symbols.push(substituted_symbol(&b, &chart, CutoffPart::Sphere, scales)?);
    }
    let u = cfg.state()?.resolve(h, &model)?.state;
    let pot = cfg.potential.build(u.dim(), h)?;
    let vals = time_averaged_pairings(&u, &symbols, &model, &pot, t_h, &cfg.window.build()?, cfg.dt.eval(h))?;
    Ok(vals[1..].iter().map(|v| (v - vals[0]).abs()).collect())
}

/// `|⟨compact(a), u(t)⟩ − ⟨compact(a∘φ̃¹_t), u(0)⟩|`, per `t`.
fn transport_defects(cfg: &ExperimentConfig, sec: &FlowCheck, h: f64) -> Result<Vec<f64>> {
    let (model, _, chart, a) = flow_setup(cfg, sec)?;
    let t_h = cfg.tau_law()?.eval(h);
    let scales = Scales { tau: t_h, r: sec.cutoff, delta: sec.delta };
    let compact = substituted_symbol(&a, &chart, CutoffPart::Compact, scales)?;
    let u0 = cfg.state()?.resolve(h, &model)?.state;
    let pot = cfg.potential.build(u0.dim(), h)?;
    let mut times = sec.times.clone();
    times.sort_by(f64::total_cmp);
    let (mut u, mut now) = (u0.clone(), 0.0);
    let mut out = Vec::new();
    for t in times {
        u = perturbed_propagate(&u, t_h * (t - now), &model, &pot, cfg.dt.eval(h))?;
        now = t;
        let b = two_micro_flow_pullback(&a, &chart, Flow::Phi1Tilde { t })?;
        let pulled = substituted_symbol(&b, &chart, CutoffPart::Compact, scales)?;
        out.push((wigner_pairing(&u, &compact)? - wigner_pairing(&u0, &pulled)?).abs());
    }
    Ok(out)
}

fn push_reduction(report: &mut SweepReport, cfg: &ExperimentConfig, metric: &str, tau: f64) {
    let (h0, h1) = (cfg.h_list[0], *cfg.h_list.last().unwrap());
    let ratio = report.value(h0, metric).unwrap_or(f64::NAN) / report.value(h1, metric).unwrap_or(f64::NAN);
    let name = metric.replacen("defect", "reduction", 1);
    report.push(h1, tau, name, ratio);
}

/// `K_h` property checks and the two-microlocal flow checks, whichever sections are present.
pub fn kh_diagnostics(cfg: &ExperimentConfig, seed: u64) -> Result<SweepReport> {
    let sec = cfg.section(&cfg.diagnostics, "diagnostics")?;
    if sec.kh.is_none() && sec.invariance.is_none() && sec.transport.is_none() {
        return Err(Error::ConfigError("[diagnostics] lists no check".into()));
    }
    let mut report = SweepReport::new("kh-diagnostics");
    if let Some(kh) = &sec.kh {
        let model = cfg.model()?;
        let rows: Vec<Result<(f64, f64, f64)>> =
            cfg.h_list.par_iter().map(|&h| kh_errors(&model, kh, h, seed)).collect();
        for (&h, r) in cfg.h_list.iter().zip(rows) {
            let (p, b, r) = r?;
            report.push(h, 1.0, "kh_plancherel_error", p);
            report.push(h, 1.0, "kh_bloch_defect", b);
            report.push(h, 1.0, "kh_rebuild_error", r);
        }
        report.set_meta("kh_states", kh.states);
    }
    for (tag, check) in [("invariance", &sec.invariance), ("transport", &sec.transport)] {
        let Some(check) = check else { continue };
        let rows: Vec<Result<Vec<f64>>> = cfg
            .h_list
            .par_iter()
            .map(|&h| if tag == "invariance" { invariance_defects(cfg, check, h) } else { transport_defects(cfg, check, h) })
            .collect();
        let tau = cfg.tau_law()?;
        let var = if tag == "invariance" { "s" } else { "t" };
        for (&h, r) in cfg.h_list.iter().zip(rows) {
            for (t, v) in check.times.iter().zip(r?) {
                report.push(h, tau.eval(h), format!("{tag}_defect[{var}={t}]"), v);
            }
        }
        let h1 = *cfg.h_list.last().unwrap();
        for t in &check.times {
            push_reduction(&mut report, cfg, &format!("{tag}_defect[{var}={t}]"), tau.eval(h1));
        }
        report.set_meta(&format!("{tag}_cutoff"), check.cutoff);
        report.set_meta(&format!("{tag}_delta"), check.delta);
    }
    report.set_meta("seed", seed);
    Ok(report)
}
