use hamiltonians::HamiltonianModel;
use lattice_core::{Error, Result};
use nalgebra::DVector;
use num_complex::Complex64;
use torus_quantization::TorusSymbol;
use wigner_measures::{ChartF, TwoMicroSymbol};

/// Classical flows acting on two-microlocal symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Flow {
    /// `(x + s dH(ξ), ξ, η)`.
    Phi0 { s: f64 },
    /// `(x + s d²H(σ(ξ)) η/|η|, ξ, η)`.
    Phi1 { s: f64 },
    /// `(x + t d²H(σ(ξ)) η, ξ, η)`, i.e. `φ¹_{t|η|}`.
    Phi1Tilde { t: f64 },
}

/// `a ∘ φ_s` with `φ_s(x, ξ) = (x + s dH(ξ), ξ)`.
pub fn flow_pullback(a: &TorusSymbol, model: &HamiltonianModel, s: f64) -> Result<TorusSymbol> {
    a.flow_pullback(model, s)
}

fn dot_i(k: &[i64], v: &[f64]) -> f64 {
    k.iter().zip(v).map(|(a, b)| *a as f64 * b).sum()
}

/// `k·d²H(σ(ξ)) v`, or 0 where the chart or Hessian is unavailable.
fn hessian_phase(chart: &ChartF, k: &[i64], xi: &[f64], v: &[f64]) -> f64 {
    let Ok(sigma) = chart.sigma(xi) else { return 0.0 };
    let Ok(hess) = chart.hessian_at(&sigma) else { return 0.0 };
    let w = hess * DVector::from_column_slice(v);
    dot_i(k, w.as_slice())
}

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
}

/// `a ∘ flow` mode by mode. For `φ̃¹` the result has no limit at infinity in `η`
/// and its homogeneous part is set to zero.
pub fn two_micro_flow_pullback(a: &TwoMicroSymbol, chart: &ChartF, flow: Flow) -> Result<TwoMicroSymbol> {
    if a.lambda() != chart.lambda() {
        return Err(Error::ShapeError("symbol and chart use different lattices".into()));
    }
    let (c, r) = a.support();
    let dist = c.iter().zip(chart.center()).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    if dist + r > chart.radius() / 2.0 {
        return Err(Error::OutOfChart {
            distance: dist + r,
            radius: chart.radius() / 2.0,
        });
    }
    let one = Complex64::new(1.0, 0.0);
    Ok(match flow {
        Flow::Phi0 { s } => {
            let (m1, m2) = (chart.model().clone(), chart.model().clone());
            let f = move |k: &[i64], xi: &[f64], _: &[f64]| {
                m1.gradient(xi).map_or(one, |g| Complex64::from_polar(1.0, s * dot_i(k, &g)))
            };
            let fh = move |k: &[i64], xi: &[f64], _: &[f64]| {
                m2.gradient(xi).map_or(one, |g| Complex64::from_polar(1.0, s * dot_i(k, &g)))
            };
            a.map_modes(f, fh)
        }
        Flow::Phi1 { s } => {
            let (c1, c2) = (chart.clone(), chart.clone());
            let f = move |k: &[i64], xi: &[f64], eta: &[f64]| {
                unit(eta).map_or(one, |w| Complex64::from_polar(1.0, s * hessian_phase(&c1, k, xi, &w)))
            };
            let fh = move |k: &[i64], xi: &[f64], w: &[f64]| {
                unit(w).map_or(one, |w| Complex64::from_polar(1.0, s * hessian_phase(&c2, k, xi, &w)))
            };
            a.map_modes(f, fh)
        }
        Flow::Phi1Tilde { t } => {
            let c1 = chart.clone();
            let f = move |k: &[i64], xi: &[f64], eta: &[f64]| {
                Complex64::from_polar(1.0, t * hessian_phase(&c1, k, xi, eta))
            };
            a.map_modes(f, |_: &[i64], _: &[f64], _: &[f64]| Complex64::new(0.0, 0.0))
        }
    })
}
