use serde::Serialize;
use serde_json::{Map, Value};
use std::fs;
use std::io::Write;
use std::path::Path;
use torus_quantization::DensityGrid;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub command: String,
    pub h: f64,
    pub tau: f64,
    pub metric: String,
    pub value: f64,
}

/// A density snapshot written as `density_<h>_<t>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOutput {
    pub h: f64,
    pub t: f64,
    pub grid: DensityGrid,
}

/// Rows `(h, τ_h, metric, value)` plus a metadata block.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub command: String,
    pub rows: Vec<Row>,
    pub meta: Map<String, Value>,
    pub densities: Vec<DensityOutput>,
}

fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

impl SweepReport {
    pub fn new(command: &str) -> Self {
        SweepReport { command: command.to_string(), rows: Vec::new(), meta: Map::new(), densities: Vec::new() }
    }

    pub fn push(&mut self, h: f64, tau: f64, metric: impl Into<String>, value: f64) {
        self.rows.push(Row { command: self.command.clone(), h, tau, metric: metric.into(), value });
    }

    pub fn set_meta(&mut self, key: &str, value: impl Serialize) {
        self.meta.insert(key.to_string(), serde_json::to_value(value).expect("metadata serializes"));
    }

    /// The value of `metric` at `h`, if reported.
    pub fn value(&self, h: f64, metric: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.h == h && r.metric == metric).map(|r| r.value)
    }

    /// All `(h, value)` pairs of `metric`, in report order.
    pub fn series(&self, metric: &str) -> Vec<(f64, f64)> {
        self.rows.iter().filter(|r| r.metric == metric).map(|r| (r.h, r.value)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("command,h,tau,metric,value\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{},{}\n", r.command, fmt_num(r.h), fmt_num(r.tau), r.metric, fmt_num(r.value)));
        }
        s
    }

    /// Writes `report.csv`, `meta.json` and the density grids; each file is written
    /// to a temporary name and renamed into place.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        write_atomic(&dir.join("report.csv"), self.to_csv().as_bytes())?;
        let meta = serde_json::to_string_pretty(&self.meta).expect("metadata serializes");
        write_atomic(&dir.join("meta.json"), meta.as_bytes())?;
        for d in &self.densities {
            let mut buf = Vec::new();
            d.grid.write_csv(&mut buf)?;
            write_atomic(&dir.join(format!("density_{}_{}.csv", fmt_num(d.h), d.t)), &buf)?;
        }
        Ok(())
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}

/// Least-squares slope of `log y` against `log h`, over positive entries.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(h, y)| *h > 0.0 && *y > 0.0).map(|(h, y)| (h.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
