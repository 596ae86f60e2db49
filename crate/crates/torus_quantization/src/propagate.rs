use crate::fft::{fold_into, grid_point, unfold_from, NdFft};
use crate::grid::FourierGrid;
use crate::state::FourierState;
use crate::symbol::TorusSymbol;
use crate::weyl::weyl_apply_on;
use hamiltonians::HamiltonianModel;
use lattice_core::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

/// Growth of the coefficient mass in the outer band allowed per potential step.
pub const MARGIN_TOL: f64 = 1e-12;

/// A bounded operator family `V(t)` supplied by the caller.
pub trait PotentialOperator: Send + Sync {
    /// Replaces `u` by `exp(−i · coupling · V(t_mid)) u`.
    fn exp_step(&self, u: &mut FourierState, t_mid: f64, coupling: f64) -> Result<()>;
    /// Bound on `sup_t ‖V(t)‖`.
    fn sup_bound(&self) -> f64;
    /// Number of modes `V` may move coefficients by.
    fn bandwidth(&self) -> usize {
        1
    }
}

/// The perturbation in `ih∂_t ψ = (H(hD) + h² V) ψ`.
#[derive(Clone)]
pub enum PotentialSpec {
    Zero,
    /// `V(x)`; the symbol must not depend on ξ.
    Multiplication { symbol: TorusSymbol, sup_bound: f64 },
    /// `Op_h(V(x, ξ))`.
    Pseudodifferential { symbol: TorusSymbol, sup_bound: f64 },
    Operator(Arc<dyn PotentialOperator>),
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::Zero => write!(f, "Zero"),
            PotentialSpec::Multiplication { symbol, sup_bound } => f
                .debug_struct("Multiplication")
                .field("symbol", symbol)
                .field("sup_bound", sup_bound)
                .finish(),
            PotentialSpec::Pseudodifferential { symbol, sup_bound } => f
                .debug_struct("Pseudodifferential")
                .field("symbol", symbol)
                .field("sup_bound", sup_bound)
                .finish(),
            PotentialSpec::Operator(op) => write!(f, "Operator(sup ≤ {})", op.sup_bound()),
        }
    }
}

impl PotentialSpec {
    /// Multiplication potential with the bound `Σ_k |c_k|`.
    pub fn multiplication(symbol: TorusSymbol) -> Self {
        let z = vec![0.0; symbol.dim()];
        let sup_bound = (0..symbol.modes().len()).map(|i| symbol.coeff(i, &z).norm()).sum();
        PotentialSpec::Multiplication { symbol, sup_bound }
    }

    pub fn pseudodifferential(symbol: TorusSymbol, sup_bound: f64) -> Self {
        PotentialSpec::Pseudodifferential { symbol, sup_bound }
    }

    pub fn sup_bound(&self) -> f64 {
        match self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::Multiplication { sup_bound, .. }
            | PotentialSpec::Pseudodifferential { sup_bound, .. } => *sup_bound,
            PotentialSpec::Operator(op) => op.sup_bound(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PotentialSpec::Zero)
    }

    fn bandwidth(&self) -> usize {
        match self {
            PotentialSpec::Zero => 0,
            PotentialSpec::Multiplication { symbol, .. }
            | PotentialSpec::Pseudodifferential { symbol, .. } => symbol.bandwidth().max(1),
            PotentialSpec::Operator(op) => op.bandwidth().max(1),
        }
    }
}

/// `H(hk)` for every grid mode.
pub fn energies(grid: &FourierGrid, model: &HamiltonianModel) -> Vec<f64> {
    let d = grid.dim();
    let h = grid.h();
    (0..grid.len())
        .into_par_iter()
        .map_init(
            || (vec![0i64; d], vec![0.0; d]),
            |(k, xi), i| {
                grid.mode_into(i, k);
                for (x, kk) in xi.iter_mut().zip(k.iter()) {
                    *x = h * *kk as f64;
                }
                model.energy(xi)
            },
        )
        .collect()
}

fn apply_phases(coeffs: &mut [Complex64], e: &[f64], t: f64, h: f64) {
    coeffs.par_iter_mut().zip(e.par_iter()).for_each(|(c, en)| {
        *c *= Complex64::from_polar(1.0, -t * en / h);
    });
}

/// `û(k) ↦ e^{−i(t/h)H(hk)} û(k)`.
pub fn free_propagate(u: &FourierState, t: f64, model: &HamiltonianModel) -> FourierState {
    let e = energies(&u.grid, model);
    free_propagate_with(u, t, &e)
}

/// As [`free_propagate`] with precomputed energies.
pub fn free_propagate_with(u: &FourierState, t: f64, energies: &[f64]) -> FourierState {
    let mut v = u.clone();
    apply_phases(&mut v.coeffs, energies, t, u.h());
    v
}

/// Strang split-step integrator on a fixed grid.
pub struct SplitStepper<'a> {
    grid: FourierGrid,
    potential: &'a PotentialSpec,
    dt: f64,
    energies: Vec<f64>,
    fft: Option<NdFft>,
    vx: Vec<Complex64>,
    buf: Vec<Complex64>,
    kick: Option<(f64, Vec<Complex64>)>,
    time: f64,
    pending: f64,
}

impl<'a> SplitStepper<'a> {
    pub fn new(
        grid: &FourierGrid,
        model: &HamiltonianModel,
        potential: &'a PotentialSpec,
        dt: f64,
    ) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::PreconditionFailed(format!("dt must be positive, got {dt}")));
        }
        let (fft, vx) = match potential {
            PotentialSpec::Multiplication { symbol, .. } => {
                if symbol.dim() != grid.dim() {
                    return Err(Error::ShapeError("potential and grid dimensions differ".into()));
                }
                let s = grid.side();
                let f = NdFft::new(s, grid.dim());
                let z = vec![0.0; grid.dim()];
                let vx: Vec<Complex64> = (0..f.len())
                    .into_par_iter()
                    .map_init(
                        || vec![0.0; grid.dim()],
                        |x, i| {
                            grid_point(i, s, x);
                            symbol.eval(x, &z)
                        },
                    )
                    .collect();
                (Some(f), vx)
            }
            _ => (None, vec![]),
        };
        let buf = vec![Complex64::new(0.0, 0.0); fft.as_ref().map_or(0, |f| f.len())];
        Ok(SplitStepper {
            grid: grid.clone(),
            potential,
            dt,
            energies: energies(grid, model),
            fft,
            vx,
            buf,
            kick: None,
            time: 0.0,
            pending: 0.0,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    fn flush(&mut self, u: &mut FourierState) {
        if self.pending != 0.0 {
            apply_phases(&mut u.coeffs, &self.energies, self.pending, self.grid.h());
            self.pending = 0.0;
        }
    }

    fn potential_step(&mut self, u: &mut FourierState, t_mid: f64, step: f64) -> Result<()> {
        let h = self.grid.h();
        let coupling = h * step;
        let band = self.potential.bandwidth();
        let before = u.edge_mass(band);
        match self.potential {
            PotentialSpec::Zero => {}
            PotentialSpec::Multiplication { .. } => {
                let fft = self.fft.as_ref().expect("plan exists for multiplication potentials");
                let s = fft.side();
                fold_into(&self.grid, &u.coeffs, s, &mut self.buf);
                fft.inverse(&mut self.buf);
                if self.kick.as_ref().is_none_or(|(c, _)| *c != coupling) {
                    let scale = 1.0 / fft.len() as f64;
                    let k = self
                        .vx
                        .par_iter()
                        .map(|v| (Complex64::new(0.0, -coupling) * v).exp() * scale)
                        .collect();
                    self.kick = Some((coupling, k));
                }
                let kick = &self.kick.as_ref().expect("kick computed above").1;
                self.buf.par_iter_mut().zip(kick.par_iter()).for_each(|(b, k)| *b *= k);
                fft.forward(&mut self.buf);
                unfold_from(&self.grid, &self.buf, &mut u.coeffs);
            }
            PotentialSpec::Pseudodifferential { symbol, .. } => {
                taylor_exp(symbol, u, coupling)?;
            }
            PotentialSpec::Operator(op) => op.exp_step(u, t_mid, coupling)?,
        }
        if u.edge_mass(band) - before > MARGIN_TOL {
            return Err(Error::TruncationError {
                required_radius: self.grid.radius() + 2 * band,
            });
        }
        Ok(())
    }

    /// Advances `u` by `span ≥ 0`: full steps of `dt` plus a last partial step.
    pub fn advance(&mut self, u: &mut FourierState, span: f64) -> Result<()> {
        if u.grid != self.grid {
            return Err(Error::ShapeError("state grid differs from the stepper grid".into()));
        }
        if span < 0.0 {
            return Err(Error::PreconditionFailed("negative propagation span".into()));
        }
        if self.potential.is_zero() {
            apply_phases(&mut u.coeffs, &self.energies, span, self.grid.h());
            self.time += span;
            return Ok(());
        }
        let ratio = span / self.dt;
        let mut nfull = ratio.floor() as usize;
        let mut rem = span - nfull as f64 * self.dt;
        if (ratio - ratio.round()).abs() < 1e-9 {
            nfull = ratio.round() as usize;
            rem = 0.0;
        }
        let steps = (0..nfull).map(|_| self.dt).chain((rem > 0.0).then_some(rem));
        for s in steps.collect::<Vec<_>>() {
            self.pending += s / 2.0;
            self.flush(u);
            let t_mid = self.time + s / 2.0;
            self.potential_step(u, t_mid, s)?;
            self.pending += s / 2.0;
            self.time += s;
        }
        self.flush(u);
        Ok(())
    }
}

/// `exp(−i c Op_h(a)) u` by a Taylor series on the grid of `u`.
fn taylor_exp(a: &TorusSymbol, u: &mut FourierState, c: f64) -> Result<()> {
    let base = u.norm().max(f64::MIN_POSITIVE);
    let mut term = u.clone();
    let mut acc = u.coeffs.clone();
    for n in 1..=80 {
        let next = weyl_apply_on(a, &term, &u.grid)?;
        let f = Complex64::new(0.0, -c / n as f64);
        term.coeffs = next.coeffs.into_iter().map(|v| v * f).collect();
        for (x, t) in acc.iter_mut().zip(&term.coeffs) {
            *x += *t;
        }
        if term.norm() < 1e-17 * base {
            u.coeffs = acc;
            return Ok(());
        }
    }
    Err(Error::PreconditionFailed(
        "potential exponential did not converge; reduce dt".into(),
    ))
}

/// `S_h^t u` for `ih∂_t = H(hD) + h²V` by Strang splitting with step `dt`.
pub fn perturbed_propagate(
    u: &FourierState,
    t: f64,
    model: &HamiltonianModel,
    potential: &PotentialSpec,
    dt: f64,
) -> Result<FourierState> {
    if potential.is_zero() {
        return Ok(free_propagate(u, t, model));
    }
    let mut st = SplitStepper::new(&u.grid, model, potential, dt)?;
    let mut v = u.clone();
    st.advance(&mut v, t)?;
    v.normalized = (v.norm_sqr() - 1.0).abs() < crate::state::NORM_TOL;
    Ok(v)
}

/// Calls `f(i, S_h^{times[i]} u0)` for nondecreasing `times ≥ 0`.
pub fn for_each_sample(
    u0: &FourierState,
    model: &HamiltonianModel,
    potential: &PotentialSpec,
    times: &[f64],
    dt: f64,
    mut f: impl FnMut(usize, &FourierState) -> Result<()>,
) -> Result<()> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|t| *t < 0.0) {
        return Err(Error::PreconditionFailed("sample times must be nondecreasing and ≥ 0".into()));
    }
    if potential.is_zero() {
        let e = energies(&u0.grid, model);
        for (i, &t) in times.iter().enumerate() {
            f(i, &free_propagate_with(u0, t, &e))?;
        }
        return Ok(());
    }
    let mut st = SplitStepper::new(&u0.grid, model, potential, dt)?;
    let mut u = u0.clone();
    let mut now = 0.0;
    for (i, &t) in times.iter().enumerate() {
        st.advance(&mut u, t - now)?;
        now = t;
        f(i, &u)?;
    }
    Ok(())
}
