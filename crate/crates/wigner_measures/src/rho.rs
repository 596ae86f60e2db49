use crate::chart::ChartF;
use crate::kh::{kh_transform, KhField, KhFiber};
use crate::window::MWindow;
use lattice_core::{Error, Result, SubmoduleBasis};
use nalgebra::DMatrix;
use num_complex::Complex64;
use torus_quantization::{FourierState, TorusSymbol};

/// An `s`-independent observable `Q(ω, σ)`: a Hermitian matrix on each fiber's modes.
pub trait BlochObservable: Sync {
    fn matrix(&self, fiber: &KhFiber, h: f64) -> Result<DMatrix<Complex64>>;
}

/// `Q = I` on every fiber.
pub struct IdentityObservable;

impl BlochObservable for IdentityObservable {
    fn matrix(&self, fiber: &KhFiber, _h: f64) -> Result<DMatrix<Complex64>> {
        Ok(DMatrix::identity(fiber.modes.len(), fiber.modes.len()))
    }
}

/// Rank-one projector on the fiber mode `k` (zero on the other fibers).
pub struct ModeProjector {
    pub k: Vec<i64>,
}

impl BlochObservable for ModeProjector {
    fn matrix(&self, fiber: &KhFiber, _h: f64) -> Result<DMatrix<Complex64>> {
        let n = fiber.modes.len();
        let mut q = DMatrix::zeros(n, n);
        if let Some(i) = fiber.modes.iter().position(|m| m.0 == self.k) {
            q[(i, i)] = Complex64::new(1.0, 0.0);
        }
        Ok(q)
    }
}

/// Fiber restriction of `Op_h(b)` for a symbol with x-modes in `Λ`:
/// entry `(k, k′) = c_{k−k′}(h(k + k′)/2) = c_{λ−λ′}(σ + h(η_λ + η_λ′)/2)`.
pub struct SymbolObservable {
    symbol: TorusSymbol,
}

impl SymbolObservable {
    pub fn new(symbol: TorusSymbol, lambda: &SubmoduleBasis) -> Result<Self> {
        if let Some(k) = symbol.modes().iter().find(|k| !lambda.contains_i64(k)) {
            return Err(Error::PreconditionFailed(format!("x-mode {k:?} is not in Λ")));
        }
        Ok(SymbolObservable { symbol })
    }
}

impl BlochObservable for SymbolObservable {
    fn matrix(&self, fiber: &KhFiber, h: f64) -> Result<DMatrix<Complex64>> {
        let n = fiber.modes.len();
        let d = self.symbol.dim();
        let mut q = DMatrix::zeros(n, n);
        let mut diff = vec![0i64; d];
        let mut mid = vec![0.0; d];
        for (i, (k, _)) in fiber.modes.iter().enumerate() {
            for (j, (kp, _)) in fiber.modes.iter().enumerate() {
                for a in 0..d {
                    diff[a] = k[a] - kp[a];
                    mid[a] = 0.5 * h * (k[a] + kp[a]) as f64;
                }
                if let Some(mi) = self.symbol.modes().iter().position(|m| *m == diff) {
                    q[(i, j)] = self.symbol.coeff(mi, &mid);
                }
            }
        }
        Ok(q)
    }
}

/// `Σ_σ ⟨v(σ), Q(ω_h(σ), σ) v(σ)⟩` over the fibers of a precomputed field.
pub fn rho_pairing_field(field: &KhField, q: &dyn BlochObservable) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for f in &field.fibers {
        let m = q.matrix(f, field.h)?;
        let n = f.modes.len();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::ShapeError(format!(
                "observable of size {}×{} on a fiber of {n} modes",
                m.nrows(),
                m.ncols()
            )));
        }
        let v = f.amplitudes();
        for i in 0..n {
            let row: Complex64 = (0..n).map(|j| m[(i, j)] * v[j]).sum();
            total += v[i].conj() * row;
        }
    }
    Ok(total)
}

/// ρ-pairing of `u` with `Q`, through [`kh_transform`].
pub fn rho_pairing(u: &FourierState, q: &dyn BlochObservable, chart: &ChartF, m: &MWindow) -> Result<Complex64> {
    rho_pairing_field(&kh_transform(u, chart, m)?, q)
}
