use experiments_cli::commands::observability::ObservationForm;
use experiments_cli::commands::spacing::levels;
use experiments_cli::config::{BoxSpec, ExperimentConfig};
use experiments_cli::{run, Command};
use hamiltonians::HamiltonianModel;
use lattice_core::Error;
use std::f64::consts::PI;
use std::process;
use torus_quantization::FourierGrid;

const OBSERVABILITY: &str = r#"
h_list = [0.0625, 0.03125]
seed = 7

[model]
kind = "quadratic"
a = [[2, 0], [0, 2]]

[observability]
boxes = [{ ranges = [[0.0, 1.5707963267948966], [0.0, 6.283185307179586]] }]
chi_center = [1.0, 0.5]
chi_radius = 0.5
horizon = 1.0
draws = 16
plane_waves = true
"#;

fn semiclass(cmd: &str, cfg: &std::path::Path, out: &std::path::Path, seed: u64) {
    let status = process::Command::new(env!("CARGO_BIN_EXE_semiclass"))
        .args([cmd, "--config"])
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .args(["--seed", &seed.to_string(), "--threads", "2"])
        .stdout(process::Stdio::null())
        .status()
        .expect("binary runs");
    assert!(status.success());
}

#[test]
fn same_config_and_seed_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("obs.toml");
    std::fs::write(&cfg, OBSERVABILITY).unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    semiclass("observability", &cfg, &a, 3);
    semiclass("observability", &cfg, &b, 3);
    semiclass("observability", &cfg, &c, 4);
    let ra = std::fs::read(a.join("report.csv")).unwrap();
    assert_eq!(ra, std::fs::read(b.join("report.csv")).unwrap());
    assert_ne!(ra, std::fs::read(c.join("report.csv")).unwrap());
    let head = String::from_utf8(ra).unwrap();
    assert!(head.starts_with("command,h,tau,metric,value\n"));

    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("meta.json")).unwrap()).unwrap();
    let want = ExperimentConfig::from_toml(OBSERVABILITY).unwrap().hash();
    assert_eq!(meta["config_hash"], want);
    assert_eq!(meta["seed"], 3);
    for key in ["resonance_qmax", "resonance_tol", "level_tol", "chart_tol"] {
        assert!(meta["tolerances"].get(key).is_some(), "{key}");
    }
}

#[test]
fn hash_ignores_formatting_but_not_values() {
    let a = ExperimentConfig::from_toml(OBSERVABILITY).unwrap().hash();
    let spaced = OBSERVABILITY.replace("seed = 7", "seed   =   7");
    assert_eq!(a, ExperimentConfig::from_toml(&spaced).unwrap().hash());
    let other = OBSERVABILITY.replace("draws = 16", "draws = 17");
    assert_ne!(a, ExperimentConfig::from_toml(&other).unwrap().hash());
}

#[test]
fn free_levels_in_window_match_closed_form() {
    let h = 0.1;
    let model = HamiltonianModel::quadratic_identity(1, 2);
    let grid = FourierGrid::new(1, 40, h).unwrap();
    let lv = levels(&grid, &model, [1.0, 4.0]);
    let want: Vec<f64> = (11..20).map(|k| (h * k as f64).powi(2)).collect();
    assert_eq!(lv.len(), want.len());
    for (a, b) in lv.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12);
    }
    for (k, w) in (11..).zip(lv.windows(2)) {
        assert!(((w[1] - w[0]) - h * h * (2 * k + 1) as f64).abs() < 1e-12);
    }
    let gap = lv.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    assert!((h / gap - h / (h * h * 23.0)).abs() < 1e-9);
}

#[test]
fn plane_wave_observation_is_box_fraction_times_horizon() {
    let modes = vec![vec![3i64]];
    let e = [0.09];
    let half = [BoxSpec { ranges: vec![[0.0, PI]] }];
    let form = ObservationForm::new(&modes, &e, 0.1, &half, 1.0).unwrap();
    assert!((1.0 / form.diagonal(0) - 2.0).abs() < 1e-14);

    let whole = [BoxSpec { ranges: vec![[0.0, 2.0 * PI]] }];
    let form = ObservationForm::new(&modes, &e, 0.1, &whole, 2.5).unwrap();
    assert!((1.0 / form.diagonal(0) - 0.4).abs() < 1e-14);
}

#[test]
fn full_torus_form_is_diagonal() {
    let modes: Vec<Vec<i64>> = (0..5).map(|k| vec![k, 1 - k]).collect();
    let h = 0.125;
    let e: Vec<f64> = modes.iter().map(|m| m.iter().map(|k| (h * *k as f64).powi(2)).sum()).collect();
    let whole = [BoxSpec { ranges: vec![[0.0, 2.0 * PI], [-PI, PI]] }];
    let form = ObservationForm::new(&modes, &e, h, &whole, 3.0).unwrap();
    let c: Vec<num_complex::Complex64> =
        (0..5).map(|k| num_complex::Complex64::new(k as f64 - 1.5, 0.5 * k as f64)).collect();
    let norm: f64 = c.iter().map(|v| v.norm_sqr()).sum();
    assert!((form.eval(&c) - 3.0 * norm).abs() < 1e-12 * norm);
}

fn config_error(text: &str, cmd: Command) -> bool {
    match ExperimentConfig::from_toml(text) {
        Err(Error::ConfigError(_)) => true,
        Ok(cfg) => matches!(run(cmd, &cfg, None), Err(Error::ConfigError(_))),
        Err(_) => false,
    }
}

#[test]
fn bad_configs_are_rejected() {
    assert!(config_error(&OBSERVABILITY.replace("h_list = [0.0625, 0.03125]", "h_list = [0.1]"), Command::Observability));
    assert!(config_error(
        &OBSERVABILITY.replace("h_list = [0.0625, 0.03125]", "h_list = [0.03125, 0.0625]"),
        Command::Observability
    ));
    assert!(config_error(&OBSERVABILITY.replace("horizon = 1.0", "horizon = 0.0"), Command::Observability));
    let saddle = OBSERVABILITY.replace("kind = \"quadratic\"\na = [[2, 0], [0, 2]]", "kind = \"saddle2d\"");
    assert!(saddle.contains("saddle2d"));
    assert!(config_error(&saddle, Command::Observability));
    assert!(config_error(&OBSERVABILITY.replace("draws = 16", "draws = 16\nbogus = 1"), Command::Observability));
    assert!(config_error(OBSERVABILITY, Command::Spacing));
    assert!(config_error(OBSERVABILITY, Command::LimitCompare));
}

#[test]
fn spacing_needs_two_levels() {
    let text = r#"
h_list = [0.125]

[model]
kind = "quadratic"
a = [[2]]

[spacing]
energy_window = [1.0, 1.01]
radius = 16
"#;
    let cfg = ExperimentConfig::from_toml(text).unwrap();
    assert!(matches!(run(Command::Spacing, &cfg, None), Err(Error::EmptyCluster(_))));
    let wide = ExperimentConfig::from_toml(&text.replace("[1.0, 1.01]", "[1.0, 4.0]")).unwrap();
    let r = run(Command::Spacing, &wide, None).unwrap();
    let tau: Vec<f64> = r.rows.iter().filter(|x| x.metric == "tau_H").map(|x| x.value).collect();
    // levels (k/8)², k = 9..15; smallest gap 19/64
    assert_eq!(tau.len(), 1);
    assert!((tau[0] - 0.125 / (19.0 / 64.0)).abs() < 1e-12);
}
