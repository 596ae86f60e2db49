//! Sweep experiments over `h` for semiclassical Schrödinger dynamics on the torus,
//! reported as `command,h,tau,metric,value` rows plus a JSON metadata record.

pub mod commands;
pub mod config;
pub mod report;

use clap::ValueEnum;
use config::ExperimentConfig;
use lattice_core::Result;
use report::SweepReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    OrbitConvergence,
    DiracDrift,
    ThresholdSweep,
    LimitCompare,
    Observability,
    Spacing,
    Counterexamples,
    KhDiagnostics,
}

/// Runs `cmd` and attaches the config hash, seed and tolerance parameters.
pub fn run(cmd: Command, cfg: &ExperimentConfig, seed: Option<u64>) -> Result<SweepReport> {
    let seed = seed.unwrap_or(cfg.seed);
    let mut report = match cmd {
        Command::OrbitConvergence => commands::orbit_convergence(cfg)?,
        Command::DiracDrift => commands::dirac_drift(cfg)?,
        Command::ThresholdSweep => commands::threshold_sweep(cfg)?,
        Command::LimitCompare => commands::limit_compare(cfg)?,
        Command::Observability => commands::observability(cfg, seed)?,
        Command::Spacing => commands::spacing(cfg)?,
        Command::Counterexamples => commands::counterexamples(cfg)?,
        Command::KhDiagnostics => commands::kh_diagnostics(cfg, seed)?,
    };
    report.set_meta("config_hash", cfg.hash());
    report.set_meta("seed", seed);
    report.set_meta("version", env!("CARGO_PKG_VERSION"));
    report.set_meta("h_list", &cfg.h_list);
    report.set_meta(
        "tolerances",
        serde_json::json!({
            "resonance_qmax": cfg.resonance.qmax,
            "resonance_tol": cfg.resonance.tol,
            "dt": cfg.dt,
            "level_tol": states::LEVEL_TOL,
            "tail_tol": states::TAIL_TOL,
            "potential_tol": states::POTENTIAL_TOL,
            "chart_tol": wigner_measures::chart::BASE_TOL,
            "newton_tol": wigner_measures::chart::NEWTON_TOL,
        }),
    );
    Ok(report)
}
