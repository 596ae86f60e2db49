use serde::{Deserialize, Serialize};

/// `6t⁵ − 15t⁴ + 10t³` clamped to `[0, 1]`.
pub fn smootherstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

/// Radial window `m(ξ)`: one on `B(center, inner)`, zero outside `B(center, outer)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MWindow {
    pub center: Vec<f64>,
    pub inner: f64,
    pub outer: f64,
}

impl MWindow {
    pub fn new(center: &[f64], inner: f64, outer: f64) -> Self {
        MWindow { center: center.to_vec(), inner, outer }
    }

    /// One on `B(ξ0, ε/4)`, supported in the chart domain `B(ξ0, ε/2)`.
    pub fn for_chart(chart: &crate::ChartF) -> Self {
        MWindow::new(chart.center(), chart.radius() / 4.0, chart.radius() / 2.0)
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        let r = xi.iter().zip(&self.center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        1.0 - smootherstep((r - self.inner) / (self.outer - self.inner))
    }
}

/// The fixed bump `χ` on `⟨Λ⟩`: one on `|η| ≤ 1/2`, zero for `|η| ≥ 1`.
pub fn chi(eta: &[f64]) -> f64 {
    let r = eta.iter().map(|v| v * v).sum::<f64>().sqrt();
    states::plateau(r, 0.5, 1.0)
}
