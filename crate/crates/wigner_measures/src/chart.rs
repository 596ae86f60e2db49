use hamiltonians::HamiltonianModel;
use lattice_core::{ComplementData, Error, Result, SubmoduleBasis};
use nalgebra::{DMatrix, DVector};

/// Tolerance on `dH(ξ0)·k` for the base point to lie on `I_Λ`.
pub const BASE_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 20;
pub const NEWTON_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
enum Solver {
    /// `c = (BᵀAB)⁻¹ BᵀA(ξ + θ)`.
    Affine { lhs: DMatrix<f64>, a: DMatrix<f64>, theta: Vec<f64> },
    Newton,
}

/// Local splitting `ξ = σ(ξ) + η(ξ)` with `σ ∈ I_Λ` and `η ∈ ⟨Λ⟩` on `B(ξ0, ε/2)`.
#[derive(Debug, Clone)]
pub struct ChartF {
    xi0: Vec<f64>,
    lambda: SubmoduleBasis,
    complement: ComplementData,
    radius: f64,
    model: HamiltonianModel,
    /// Columns are the HNF generators of `Λ`.
    basis: DMatrix<f64>,
    solver: Solver,
}

fn definite(m: &DMatrix<f64>) -> bool {
    let e = m.clone().symmetric_eigen().eigenvalues;
    let scale = e.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    scale > 0.0 && (e.iter().all(|v| *v > 1e-12 * scale) || e.iter().all(|v| *v < -1e-12 * scale))
}

impl ChartF {
    pub fn new(model: &HamiltonianModel, xi0: &[f64], lambda: &SubmoduleBasis, radius: f64) -> Result<Self> {
        let d = xi0.len();
        if lambda.dim() != d || model.dim().is_some_and(|m| m != d) {
            return Err(Error::ShapeError(format!("chart of dimension {d} with mismatched Λ or H")));
        }
        if !(radius > 0.0) {
            return Err(Error::PreconditionFailed(format!("chart radius must be positive, got {radius}")));
        }
        let cols = lambda.columns_f64();
        let basis = DMatrix::from_fn(d, cols.len(), |i, j| cols[j][i]);
        let grad = model.gradient(xi0)?;
        for c in &cols {
            let g: f64 = c.iter().zip(&grad).map(|(a, b)| a * b).sum();
            if g.abs() > BASE_TOL {
                return Err(Error::PreconditionFailed(format!("dH(ξ0)·{c:?} = {g}, ξ0 is not on I_Λ")));
            }
        }
        let solver = match model {
            HamiltonianModel::Quadratic { a, theta } => {
                let am = DMatrix::from_fn(d, d, |i, j| lattice_core::rational::to_f64(&a[i])[j]);
                if !definite(&am) {
                    return Err(Error::ChartSingular("quadratic form is not definite".into()));
                }
                let lhs = basis.transpose() * &am * &basis;
                Solver::Affine { lhs, a: am, theta: lattice_core::rational::to_f64(theta) }
            }
            _ => {
                // d²H definite at the center and at the points ξ0 ± (ε/2)e_i
                let mut probes = vec![xi0.to_vec()];
                for i in 0..d {
                    for s in [-0.5, 0.5] {
                        let mut p = xi0.to_vec();
                        p[i] += s * radius;
                        probes.push(p);
                    }
                }
                for p in probes {
                    if !definite(&model.hessian(&p)?) {
                        return Err(Error::ChartSingular(format!("d²H not definite at {p:?}")));
                    }
                }
                Solver::Newton
            }
        };
        Ok(ChartF {
            xi0: xi0.to_vec(),
            lambda: lambda.clone(),
            complement: ComplementData::new(lambda),
            radius,
            model: model.clone(),
            basis,
            solver,
        })
    }

    /// Same chart with another choice of `Λ̃`.
    pub fn with_complement(mut self, complement: ComplementData) -> Result<Self> {
        if complement.lambda != self.lambda {
            return Err(Error::ShapeError("complement built for a different Λ".into()));
        }
        self.complement = complement;
        Ok(self)
    }

    /// Same chart, solved by Newton iteration even for quadratic `H`.
    pub fn with_newton(mut self) -> Self {
        self.solver = Solver::Newton;
        self
    }

    pub fn dim(&self) -> usize {
        self.xi0.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.xi0
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn lambda(&self) -> &SubmoduleBasis {
        &self.lambda
    }

    pub fn complement(&self) -> &ComplementData {
        &self.complement
    }

    pub fn model(&self) -> &HamiltonianModel {
        &self.model
    }

    pub fn is_affine(&self) -> bool {
        matches!(self.solver, Solver::Affine { .. })
    }

    /// Distance from the center, or `OutOfChart` beyond `ε/2`.
    pub fn check(&self, xi: &[f64]) -> Result<f64> {
        let dist = xi.iter().zip(&self.xi0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if dist.is_nan() || dist >= self.radius / 2.0 {
            return Err(Error::OutOfChart { distance: dist, radius: self.radius / 2.0 });
        }
        Ok(dist)
    }

    /// `(σ, η)` with `σ + η = ξ`, `dH(σ)·k = 0` for `k ∈ Λ` and `η ∈ ⟨Λ⟩`.
    pub fn decompose(&self, xi: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check(xi)?;
        let r = self.lambda.rank();
        if r == 0 {
            return Ok((xi.to_vec(), vec![0.0; xi.len()]));
        }
        let c = match &self.solver {
            Solver::Affine { lhs, a, theta } => {
                let shifted = DVector::from_fn(xi.len(), |i, _| xi[i] + theta[i]);
                let rhs = self.basis.transpose() * (a * shifted);
                lhs.clone()
                    .lu()
                    .solve(&rhs)
                    .ok_or_else(|| Error::ChartSingular("BᵀAB is singular".into()))?
            }
            Solver::Newton => self.newton(xi)?,
        };
        let eta_v = &self.basis * &c;
        let eta: Vec<f64> = eta_v.iter().copied().collect();
        let sigma: Vec<f64> = xi.iter().zip(&eta).map(|(a, b)| a - b).collect();
        Ok((sigma, eta))
    }

    /// Newton on the `Λ`-coordinates `c` of `η`: `Bᵀ dH(ξ − Bc) = 0`.
    fn newton(&self, xi: &[f64]) -> Result<DVector<f64>> {
        let bt = self.basis.transpose();
        // initial guess σ = ξ − P_⟨Λ⟩ξ (orthogonal projection)
        let gram = &bt * &self.basis;
        let xv = DVector::from_column_slice(xi);
        let mut c = gram
            .clone()
            .lu()
            .solve(&(&bt * &xv))
            .ok_or_else(|| Error::ChartSingular("Λ generators are dependent".into()))?;
        let scale = 1.0 + xi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for _ in 0..NEWTON_MAX_ITER {
            let sigma = &xv - &self.basis * &c;
            let s: Vec<f64> = sigma.iter().copied().collect();
            let ev = self.model.evaluate(&s)?;
            let f = &bt * DVector::from_vec(ev.gradient.clone());
            let jac = -(&bt * &ev.hessian * &self.basis);
            let step = jac
                .lu()
                .solve(&f)
                .ok_or_else(|| Error::ChartSingular(format!("singular Newton matrix at σ = {s:?}")))?;
            c -= &step;
            if step.amax() <= NEWTON_TOL * scale {
                let sigma = &xv - &self.basis * &c;
                let g = self.model.gradient(&sigma.iter().copied().collect::<Vec<_>>())?;
                let res = (&bt * DVector::from_vec(g)).amax();
                if res <= 1e-10 {
                    return Ok(c);
                }
            }
        }
        Err(Error::ChartSingular(format!("Newton stagnated at ξ = {xi:?}")))
    }

    /// `σ(ξ)` alone.
    pub fn sigma(&self, xi: &[f64]) -> Result<Vec<f64>> {
        Ok(self.decompose(xi)?.0)
    }

    /// `d²H(σ)` as a dense matrix.
    pub fn hessian_at(&self, sigma: &[f64]) -> Result<DMatrix<f64>> {
        self.model.hessian(sigma)
    }

    /// Bloch phase `ω_h(σ) = {σ_Λ / h}` as a point of `⟨Λ⟩` in the HNF box.
    pub fn bloch_phase(&self, sigma: &[f64], h: f64) -> Vec<f64> {
        let coords = self.complement.bloch_phase_coords(sigma, h);
        self.lambda.combine(&coords)
    }

    /// HNF coordinates of `ω_h(σ)` in `[0, 1)^rank`.
    pub fn bloch_phase_coords(&self, sigma: &[f64], h: f64) -> Vec<f64> {
        self.complement.bloch_phase_coords(sigma, h)
    }
}
