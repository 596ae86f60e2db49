use crate::bloch::{BlochDensityOperator, BlochSpace};
use lattice_core::{Error, Result};
use nalgebra::DVector;
use num_complex::Complex64;
use wigner_measures::{KhField, KhFiber};

/// Share of the windowed mass the dominant fiber must carry.
pub const DOMINANT_FRACTION: f64 = 0.9;

/// One `(ω, σ)` atom of the initial data: fiber mass and normalized density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochAtom {
    pub sigma: Vec<f64>,
    pub omega: Vec<f64>,
    /// `Σ |m(hk) û(k)|²` over the fiber.
    pub weight: f64,
    pub m0: BlochDensityOperator,
    /// Fiber mass falling outside the Bloch window.
    pub dropped: f64,
}

/// The pure state `Σ_k m(hk) û(k) |λ(k)⟩` of one fiber, with `λ(k) = k − σ/h + ω`.
pub fn fiber_atom(fiber: &KhFiber, field: &KhField, window_radius: usize) -> Result<BlochAtom> {
    let space = BlochSpace::new(&field.lambda, &fiber.omega, window_radius)?;
    let mut v = DVector::from_element(space.len(), Complex64::new(0.0, 0.0));
    let mut dropped = 0.0;
    for (k, a) in &fiber.modes {
        let lam: Vec<f64> = fiber
            .frequency(k, field.h)
            .iter()
            .zip(&fiber.omega)
            .map(|(f, w)| f + w)
            .collect();
        let c: Vec<i64> = field.lambda.coords(&lam)?.iter().map(|x| x.round() as i64).collect();
        match space.index_of_coords(&c) {
            Some(i) => v[i] += a,
            None => dropped += a.norm_sqr(),
        }
    }
    let weight = fiber.mass();
    let m0 = BlochDensityOperator::pure(space, &v)?;
    Ok(BlochAtom {
        sigma: fiber.sigma.clone(),
        omega: fiber.omega.clone(),
        weight,
        m0,
        dropped,
    })
}

/// Atoms for every fiber with nonzero mass.
pub fn extract_atoms(field: &KhField, window_radius: usize) -> Result<Vec<BlochAtom>> {
    field
        .fibers
        .iter()
        .filter(|f| f.mass() > 0.0)
        .map(|f| fiber_atom(f, field, window_radius))
        .collect()
}

/// The heaviest fiber, or `AmbiguousExtraction` when it carries less than
/// [`DOMINANT_FRACTION`] of the windowed mass.
pub fn dominant_atom(field: &KhField, window_radius: usize) -> Result<BlochAtom> {
    let total: f64 = field.fibers.iter().map(|f| f.mass()).sum();
    let best = field
        .fibers
        .iter()
        .max_by(|a, b| a.mass().total_cmp(&b.mass()))
        .filter(|_| total > 0.0)
        .ok_or(Error::AmbiguousExtraction { mass: 0.0 })?;
    let share = best.mass() / total;
    if share < DOMINANT_FRACTION {
        return Err(Error::AmbiguousExtraction { mass: share });
    }
    fiber_atom(best, field, window_radius)
}
