//! Closed-form Hamiltonians `H(ξ)` with exact gradients and Hessians, and
//! the pointwise predicates built on them.

use lattice_core::{
    resonance_classify, Error, Gradient, RationalVector, ResonanceMode, Result, SubmoduleBasis,
};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Radius of the excluded ball around 0 for non-even powers.
pub const POWER_SINGULAR_RADIUS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianModel {
    /// `½ A(ξ+θ)·(ξ+θ)`.
    Quadratic {
        a: Vec<Vec<BigRational>>,
        theta: RationalVector,
    },
    /// `|ξ|^α`.
    Power { alpha: f64 },
    /// `ξ·ω`.
    Linear { omega: Vec<f64> },
    /// `ξ₁² − ξ₂²`.
    Saddle2d,
    /// `ξ₁² + ξ₂² − ξ₃³`.
    Cubic3d,
    /// `base(ξ + shift)`, where `shift = hω`.
    Shifted {
        base: Box<HamiltonianModel>,
        shift: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointClass {
    pub in_ch: bool,
    pub isoenergetic_nondegenerate: bool,
}

fn even_power(alpha: f64) -> Option<u32> {
    let m = alpha / 2.0;
    (m.fract() == 0.0 && m >= 1.0 && m < 64.0).then_some(m as u32)
}

fn rf(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl HamiltonianModel {
    /// `½|ξ|²` in dimension `d`.
    pub fn half_laplacian(d: usize) -> Self {
        Self::quadratic_identity(d, 1)
    }

    /// `½ c I ξ·ξ`; `c = 2` gives `|ξ|²`.
    pub fn quadratic_identity(d: usize, c: i64) -> Self {
        let a = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| lattice_core::ratio(if i == j { c } else { 0 }, 1))
                    .collect()
            })
            .collect();
        HamiltonianModel::Quadratic {
            a,
            theta: vec![lattice_core::ratio(0, 1); d],
        }
    }

    pub fn shifted(base: HamiltonianModel, h: f64, omega: &[f64]) -> Self {
        HamiltonianModel::Shifted {
            base: Box::new(base),
            shift: omega.iter().map(|w| h * w).collect(),
        }
    }

    /// Fixed ambient dimension of the family, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            HamiltonianModel::Quadratic { theta, .. } => Some(theta.len()),
            HamiltonianModel::Linear { omega } => Some(omega.len()),
            HamiltonianModel::Saddle2d => Some(2),
            HamiltonianModel::Cubic3d => Some(3),
            HamiltonianModel::Power { .. } => None,
            HamiltonianModel::Shifted { shift, .. } => Some(shift.len()),
        }
    }

    fn check_dim(&self, xi: &[f64]) -> Result<()> {
        match self.dim() {
            Some(d) if d != xi.len() => Err(Error::ShapeError(format!(
                "Hamiltonian of dimension {d} evaluated at a point of dimension {}",
                xi.len()
            ))),
            _ => Ok(()),
        }
    }

    /// True when `H` is a quadratic polynomial (constant Hessian).
    pub fn is_quadratic(&self) -> bool {
        match self {
            HamiltonianModel::Quadratic { .. } | HamiltonianModel::Saddle2d => true,
            HamiltonianModel::Power { alpha } => *alpha == 2.0,
            HamiltonianModel::Linear { .. } => true,
            HamiltonianModel::Cubic3d => false,
            HamiltonianModel::Shifted { base, .. } => base.is_quadratic(),
        }
    }

    /// True when `H(ξ) = Σ_i f_i(ξ_i)`.
    pub fn is_separable(&self) -> bool {
        match self {
            HamiltonianModel::Quadratic { a, .. } => a
                .iter()
                .enumerate()
                .all(|(i, row)| row.iter().enumerate().all(|(j, v)| i == j || *v == lattice_core::ratio(0, 1))),
            HamiltonianModel::Power { alpha } => *alpha == 2.0,
            HamiltonianModel::Linear { .. } | HamiltonianModel::Saddle2d | HamiltonianModel::Cubic3d => true,
            HamiltonianModel::Shifted { base, .. } => base.is_separable(),
        }
    }

    /// `H(ξ)` alone; defined everywhere, including singular points of the derivatives.
    pub fn energy(&self, xi: &[f64]) -> f64 {
        match self {
            HamiltonianModel::Quadratic { a, theta } => {
                let d = xi.len();
                let mut s = 0.0;
                for i in 0..d {
                    let yi = xi[i] + rf(&theta[i]);
                    for j in 0..d {
                        let yj = xi[j] + rf(&theta[j]);
                        s += rf(&a[i][j]) * yi * yj;
                    }
                }
                0.5 * s
            }
            HamiltonianModel::Power { alpha } => {
                let r2: f64 = xi.iter().map(|x| x * x).sum();
                match even_power(*alpha) {
                    Some(m) => r2.powi(m as i32),
                    None => r2.powf(alpha / 2.0),
                }
            }
            HamiltonianModel::Linear { omega } => xi.iter().zip(omega).map(|(a, b)| a * b).sum(),
            HamiltonianModel::Saddle2d => xi[0] * xi[0] - xi[1] * xi[1],
            HamiltonianModel::Cubic3d => xi[0] * xi[0] + xi[1] * xi[1] - xi[2].powi(3),
            HamiltonianModel::Shifted { base, shift } => {
                let y: Vec<f64> = xi.iter().zip(shift).map(|(a, b)| a + b).collect();
                base.energy(&y)
            }
        }
    }

    /// `H`, `dH` and `d²H` in closed form.
    pub fn evaluate(&self, xi: &[f64]) -> Result<Evaluation> {
        self.check_dim(xi)?;
        let d = xi.len();
        match self {
            HamiltonianModel::Quadratic { a, theta } => {
                let af = DMatrix::from_fn(d, d, |i, j| rf(&a[i][j]));
                let y = DVector::from_fn(d, |i, _| xi[i] + rf(&theta[i]));
                let g = &af * &y;
                Ok(Evaluation {
                    value: 0.5 * y.dot(&g),
                    gradient: g.iter().copied().collect(),
                    hessian: af,
                })
            }
            HamiltonianModel::Power { alpha } => {
                let r2: f64 = xi.iter().map(|x| x * x).sum();
                let x = DVector::from_column_slice(xi);
                let outer = &x * x.transpose();
                match even_power(*alpha) {
                    Some(m) => {
                        let mf = m as f64;
                        let value = r2.powi(m as i32);
                        let c1 = 2.0 * mf * r2.powi(m as i32 - 1);
                        let mut hess = DMatrix::identity(d, d) * c1;
                        if m >= 2 {
                            hess += outer * (4.0 * mf * (mf - 1.0) * r2.powi(m as i32 - 2));
                        }
                        Ok(Evaluation {
                            value,
                            gradient: xi.iter().map(|v| c1 * v).collect(),
                            hessian: hess,
                        })
                    }
                    None => {
                        let r = r2.sqrt();
                        if r < POWER_SINGULAR_RADIUS {
                            return Err(Error::SingularPoint(format!(
                                "|ξ|^{alpha} is not smooth at |ξ| = {r:.3e}"
                            )));
                        }
                        let c1 = alpha * r.powf(alpha - 2.0);
                        let c2 = alpha * (alpha - 2.0) * r.powf(alpha - 4.0);
                        Ok(Evaluation {
                            value: r.powf(*alpha),
                            gradient: xi.iter().map(|v| c1 * v).collect(),
                            hessian: DMatrix::identity(d, d) * c1 + outer * c2,
                        })
                    }
                }
            }
            HamiltonianModel::Linear { omega } => Ok(Evaluation {
                value: self.energy(xi),
                gradient: omega.clone(),
                hessian: DMatrix::zeros(d, d),
            }),
            HamiltonianModel::Saddle2d => Ok(Evaluation {
                value: self.energy(xi),
                gradient: vec![2.0 * xi[0], -2.0 * xi[1]],
                hessian: DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, -2.0])),
            }),
            HamiltonianModel::Cubic3d => Ok(Evaluation {
                value: self.energy(xi),
                gradient: vec![2.0 * xi[0], 2.0 * xi[1], -3.0 * xi[2] * xi[2]],
                hessian: DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0, -6.0 * xi[2]])),
            }),
            HamiltonianModel::Shifted { base, shift } => {
                let y: Vec<f64> = xi.iter().zip(shift).map(|(a, b)| a + b).collect();
                base.evaluate(&y)
            }
        }
    }

    pub fn gradient(&self, xi: &[f64]) -> Result<Vec<f64>> {
        Ok(self.evaluate(xi)?.gradient)
    }

    pub fn hessian(&self, xi: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.evaluate(xi)?.hessian)
    }

    /// Exact gradient at a rational point, for families with rational coefficients.
    pub fn gradient_exact(&self, xi: &RationalVector) -> Option<RationalVector> {
        let two = lattice_core::ratio(2, 1);
        match self {
            HamiltonianModel::Quadratic { a, theta } => {
                let d = xi.len();
                let y: Vec<BigRational> = (0..d).map(|i| &xi[i] + &theta[i]).collect();
                Some(
                    (0..d)
                        .map(|i| (0..d).map(|j| &a[i][j] * &y[j]).sum())
                        .collect(),
                )
            }
            HamiltonianModel::Saddle2d => Some(vec![&two * &xi[0], -(&two * &xi[1])]),
            HamiltonianModel::Cubic3d => Some(vec![
                &two * &xi[0],
                &two * &xi[1],
                -(lattice_core::ratio(3, 1) * &xi[2] * &xi[2]),
            ]),
            HamiltonianModel::Power { alpha } => {
                let m = even_power(*alpha)?;
                let r2: BigRational = xi.iter().map(|v| v * v).sum();
                let mut p = lattice_core::ratio(1, 1);
                for _ in 1..m {
                    p *= &r2;
                }
                let c = lattice_core::ratio(2 * m as i64, 1) * p;
                Some(xi.iter().map(|v| &c * v).collect())
            }
            _ => None,
        }
    }
}

/// `(in C_H, isoenergetically nondegenerate)` at `ξ`.
pub fn classify_point(model: &HamiltonianModel, xi: &[f64], tol: f64) -> Result<PointClass> {
    let ev = model.evaluate(xi)?;
    let d = xi.len();
    let eig = SymmetricEigen::new(ev.hessian.clone()).eigenvalues;
    let min_abs = eig.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let has_pos = eig.iter().any(|v| *v > 0.0);
    let has_neg = eig.iter().any(|v| *v < 0.0);
    let in_ch = min_abs < tol || (has_pos && has_neg);
    let mut b = DMatrix::zeros(d + 1, d + 1);
    b.view_mut((0, 0), (d, d)).copy_from(&ev.hessian);
    for i in 0..d {
        b[(i, d)] = ev.gradient[i];
        b[(d, i)] = ev.gradient[i];
    }
    let sv = b.singular_values();
    let smax = sv.iter().fold(0.0f64, |m, v| m.max(*v));
    let smin = sv.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let nondeg = smin > tol * smax.max(1.0);
    Ok(PointClass {
        in_ch,
        isoenergetic_nondegenerate: nondeg,
    })
}

/// Relation-search parameters used to recompute the lattices of a chain.
#[derive(Debug, Clone, Copy)]
pub struct ChainSearch {
    pub qmax: i64,
    pub tol: f64,
}

impl Default for ChainSearch {
    fn default() -> Self {
        ChainSearch { qmax: 12, tol: 1e-9 }
    }
}

fn matvec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).iter().copied().collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks the sufficient nondegeneracy condition on a chain
/// `Λ₁ ⊃ Λ₂ ⊃ … ⊃ Λ_k` with directions `η_i`.
pub fn check_assumption_a(
    model: &HamiltonianModel,
    xi: &[f64],
    chain: &[(SubmoduleBasis, Vec<f64>)],
) -> Result<bool> {
    check_assumption_a_with(model, xi, chain, ChainSearch::default())
}

pub fn check_assumption_a_with(
    model: &HamiltonianModel,
    xi: &[f64],
    chain: &[(SubmoduleBasis, Vec<f64>)],
    search: ChainSearch,
) -> Result<bool> {
    if chain.is_empty() {
        return Ok(true);
    }
    let ev = model.evaluate(xi)?;
    let hess = &ev.hessian;
    let tol = search.tol;
    let fail = |msg: String| Err(Error::PreconditionFailed(msg));
    for (i, (lam, eta)) in chain.iter().enumerate() {
        let n = i + 1;
        if lam.dim() != xi.len() || eta.len() != xi.len() {
            return Err(Error::ShapeError(format!("chain element {n} has the wrong dimension")));
        }
        if lam.rank() == 0 {
            return fail(format!("Λ_{n} is the zero module"));
        }
        if i == 0 {
            let (expected, _) = resonance_classify(
                &Gradient::Float(ev.gradient.clone()),
                ResonanceMode::Detect {
                    qmax: search.qmax,
                    tol,
                },
            )?;
            if &expected != lam {
                return fail(format!(
                    "Λ_1 = {:?} differs from dH(ξ)^⊥ ∩ Z^d = {:?}",
                    lam.columns(),
                    expected.columns()
                ));
            }
            if eta.iter().all(|v| v.abs() < tol) {
                return fail("η_1 vanishes".into());
            }
            if lam.coords(eta).is_err() {
                return fail("η_1 is not in the span of Λ_1".into());
            }
        } else {
            let (prev, prev_eta) = &chain[i - 1];
            let w = matvec(hess, prev_eta);
            let expected = prev.restrict_orthogonal(&w, search.qmax, tol)?;
            if &expected != lam {
                return fail(format!(
                    "Λ_{n} = {:?} differs from (d²H η_{})^⊥ ∩ Λ_{} = {:?}",
                    lam.columns(),
                    n - 1,
                    n - 1,
                    expected.columns()
                ));
            }
            if lam.rank() >= prev.rank() {
                return fail(format!("Λ_{n} does not have smaller rank than Λ_{}", n - 1));
            }
            let scale = 1.0 + w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if dot(eta, &w).abs() > tol * scale {
                return fail(format!("η_{n} is not orthogonal to d²H η_{}", n - 1));
            }
            let hits = prev
                .columns_f64()
                .iter()
                .any(|l| dot(eta, &matvec(hess, l)).abs() > tol);
            if !hits {
                return fail(format!("η_{n} is orthogonal to d²H Λ_{}", n - 1));
            }
        }
    }
    let (last, eta) = chain.last().unwrap();
    let w = matvec(hess, eta);
    Ok(last.columns_f64().iter().any(|l| dot(l, &w).abs() > tol))
}
