use hamiltonians::HamiltonianModel;
use lattice_core::{resonance_classify, Error, Gradient, ResonanceMode, Result, SubmoduleBasis};
use num_complex::Complex64;
use torus_quantization::TorusSymbol;

/// `⟨a⟩_Λ`: the modes of `a` lying in `Λ`.
pub fn averaged_symbol(a: &TorusSymbol, lambda: &SubmoduleBasis) -> Result<TorusSymbol> {
    if a.dim() != lambda.dim() {
        return Err(Error::ShapeError(format!(
            "symbol of dimension {} averaged over a lattice in dimension {}",
            a.dim(),
            lambda.dim()
        )));
    }
    Ok(a.restrict_modes(|k| lambda.contains_i64(k)))
}

/// Data of the uniform measure on the orbit closure through `(x0, ξ0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitMeasureSpec {
    pub x0: Vec<f64>,
    pub xi0: Vec<f64>,
    /// `Λ_{ξ0}`, the integer vectors orthogonal to `dH(ξ0)`.
    pub lambda0: SubmoduleBasis,
}

impl OrbitMeasureSpec {
    /// Classifies `dH(ξ0)` with `mode` to obtain `Λ0`.
    pub fn new(model: &HamiltonianModel, x0: &[f64], xi0: &[f64], mode: ResonanceMode) -> Result<Self> {
        let g = model.gradient(xi0)?;
        let (lambda0, _) = resonance_classify(&Gradient::Float(g), mode)?;
        Self::with_lattice(x0, xi0, lambda0)
    }

    pub fn with_lattice(x0: &[f64], xi0: &[f64], lambda0: SubmoduleBasis) -> Result<Self> {
        if x0.len() != xi0.len() || lambda0.dim() != xi0.len() {
            return Err(Error::ShapeError("x0, ξ0 and Λ0 differ in dimension".into()));
        }
        Ok(OrbitMeasureSpec {
            x0: x0.to_vec(),
            xi0: xi0.to_vec(),
            lambda0,
        })
    }
}

/// `Σ_{k ∈ Λ0} c_k(ξ0) e^{ik·x0}`.
pub fn orbit_measure_pairing_complex(spec: &OrbitMeasureSpec, a: &TorusSymbol) -> Result<Complex64> {
    let avg = averaged_symbol(a, &spec.lambda0)?;
    Ok(avg.eval(&spec.x0, &spec.xi0))
}

/// Real part of [`orbit_measure_pairing_complex`]; exact for real symbols.
pub fn orbit_measure_pairing(spec: &OrbitMeasureSpec, a: &TorusSymbol) -> Result<f64> {
    Ok(orbit_measure_pairing_complex(spec, a)?.re)
}
