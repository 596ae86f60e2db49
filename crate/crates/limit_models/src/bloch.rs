use crate::averaged::averaged_symbol;
use hamiltonians::HamiltonianModel;
use lattice_core::{Error, Result, SubmoduleBasis};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use torus_quantization::{PotentialSpec, TorusSymbol};
use wigner_measures::{chi, TwoMicroSymbol};

pub const DEFAULT_WINDOW_RADIUS: usize = 32;
/// Tolerance on `dH(σ)·λ` for `σ` to be admissible.
pub const ADMISSIBILITY_TOL: f64 = 1e-8;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Finite window of `L²_ω(R^d, Λ)`: the modes `λ − ω` with `λ ∈ Λ` and HNF coordinates in `[−N, N]^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochSpace {
    lambda: SubmoduleBasis,
    omega: Vec<f64>,
    window_radius: usize,
    coords: Vec<Vec<i64>>,
    modes: Vec<Vec<i64>>,
}

impl BlochSpace {
    pub fn new(lambda: &SubmoduleBasis, omega: &[f64], window_radius: usize) -> Result<Self> {
        if omega.len() != lambda.dim() {
            return Err(Error::ShapeError("ω and Λ differ in dimension".into()));
        }
        if lambda.rank() == 0 {
            if omega.iter().any(|w| *w != 0.0) {
                return Err(Error::PreconditionFailed("ω must vanish for Λ = {0}".into()));
            }
        } else {
            lambda.coords(omega)?;
        }
        let r = lambda.rank();
        let n = window_radius as i64;
        let side = 2 * window_radius + 1;
        let count = side.pow(r as u32);
        let mut coords = Vec::with_capacity(count);
        for flat in 0..count {
            let mut rem = flat;
            let c: Vec<i64> = (0..r)
                .map(|_| {
                    let v = (rem % side) as i64 - n;
                    rem /= side;
                    v
                })
                .collect();
            coords.push(c);
        }
        let modes = coords
            .iter()
            .map(|c| {
                let v = lambda.combine(&c.iter().map(|x| *x as f64).collect::<Vec<_>>());
                v.iter().map(|x| x.round() as i64).collect()
            })
            .collect();
        Ok(BlochSpace {
            lambda: lambda.clone(),
            omega: omega.to_vec(),
            window_radius,
            coords,
            modes,
        })
    }

    pub fn lambda(&self) -> &SubmoduleBasis {
        &self.lambda
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn window_radius(&self) -> usize {
        self.window_radius
    }

    /// Number of window modes.
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Window modes `λ ∈ Λ`.
    pub fn modes(&self) -> &[Vec<i64>] {
        &self.modes
    }

    /// HNF coordinates of the window modes.
    pub fn coords(&self) -> &[Vec<i64>] {
        &self.coords
    }

    /// `λ − ω` for the `i`-th mode.
    pub fn effective_mode(&self, i: usize) -> Vec<f64> {
        self.modes[i].iter().zip(&self.omega).map(|(l, w)| *l as f64 - w).collect()
    }

    /// Index of the mode with the given HNF coordinates.
    pub fn index_of_coords(&self, c: &[i64]) -> Option<usize> {
        let n = self.window_radius as i64;
        let side = 2 * n + 1;
        let mut idx = 0i64;
        for v in c.iter().rev() {
            if v.abs() > n {
                return None;
            }
            idx = idx * side + (v + n);
        }
        Some(idx as usize)
    }

    /// Index of `λ ∈ Λ`, if it lies in the window.
    pub fn index_of(&self, lambda: &[i64]) -> Option<usize> {
        let c = self.lambda.coords_i64(lambda)?;
        self.index_of_coords(&c)
    }

    fn hopping_radius(&self, m: &[i64]) -> Result<usize> {
        let c = self
            .lambda
            .coords_i64(m)
            .ok_or_else(|| Error::PreconditionFailed(format!("hopping mode {m:?} is not in Λ")))?;
        Ok(c.iter().map(|v| v.unsigned_abs() as usize).max().unwrap_or(0))
    }

    /// Matrix with entries `f(λ − λ′, i, j)` for every Λ-mode of `modes` that fits in the window.
    fn hopping_matrix(
        &self,
        modes: &[Vec<i64>],
        mut f: impl FnMut(usize, usize, usize) -> Complex64,
    ) -> Result<DMatrix<Complex64>> {
        let mut out = DMatrix::zeros(self.len(), self.len());
        let mut hop = Vec::with_capacity(modes.len());
        for m in modes {
            let r = self.hopping_radius(m)?;
            if r > self.window_radius {
                return Err(Error::TruncationError { required_radius: r });
            }
            hop.push(self.lambda.coords_i64(m).unwrap());
        }
        for j in 0..self.len() {
            for (mi, c) in hop.iter().enumerate() {
                let target: Vec<i64> = self.coords[j].iter().zip(c).map(|(a, b)| a + b).collect();
                if let Some(i) = self.index_of_coords(&target) {
                    out[(i, j)] += f(mi, i, j);
                }
            }
        }
        Ok(out)
    }

    /// Multiplication by `⟨a⟩_Λ(·, σ)`: entry `(λ, λ′) = c_{λ−λ′}(σ)`.
    pub fn multiplication_matrix(&self, a: &TorusSymbol, sigma: &[f64]) -> Result<DMatrix<Complex64>> {
        let avg = averaged_symbol(a, &self.lambda)?;
        self.hopping_matrix(avg.modes(), |mi, _, _| avg.coeff(mi, sigma))
    }

    /// Weyl quantization in `y` of `b(y, σ, η)`: entry `(λ, λ′) = c_{λ−λ′}(σ, (λ+λ′)/2 − ω)`,
    /// times `χ(η/R)` when a compact cutoff radius is given.
    pub fn two_micro_matrix(&self, b: &TwoMicroSymbol, sigma: &[f64], cutoff: Option<f64>) -> Result<DMatrix<Complex64>> {
        if b.lambda() != &self.lambda {
            return Err(Error::ShapeError("symbol and Bloch space use different lattices".into()));
        }
        let d = sigma.len();
        let mut eta = vec![0.0; d];
        self.hopping_matrix(b.modes(), |mi, i, j| {
            for (e, ((a, c), w)) in eta.iter_mut().zip(self.modes[i].iter().zip(&self.modes[j]).zip(&self.omega)) {
                *e = 0.5 * (*a + *c) as f64 - w;
            }
            let cut = cutoff.map_or(1.0, |r| chi(&eta.iter().map(|v| v / r).collect::<Vec<_>>()));
            if cut == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            b.core(mi, sigma, &eta) * cut
        })
    }

    /// `½ d²H(σ)(λ − ω)·(λ − ω) + ⟨V(·, σ)⟩_Λ` on the window.
    pub fn generator(&self, model: &HamiltonianModel, sigma: &[f64], potential: &PotentialSpec) -> Result<DMatrix<Complex64>> {
        check_admissible(model, sigma, &self.lambda)?;
        let hess = model.hessian(sigma)?;
        let mut g = match potential {
            PotentialSpec::Zero => DMatrix::zeros(self.len(), self.len()),
            PotentialSpec::Multiplication { symbol, .. } | PotentialSpec::Pseudodifferential { symbol, .. } => {
                self.multiplication_matrix(symbol, sigma)?
            }
            PotentialSpec::Operator(_) => {
                return Err(Error::PreconditionFailed(
                    "operator potentials have no averaged symbol".into(),
                ))
            }
        };
        for i in 0..self.len() {
            let m = DVector::from_vec(self.effective_mode(i));
            g[(i, i)] += Complex64::new(0.5 * m.dot(&(&hess * &m)), 0.0);
        }
        let scale = 1.0 + g.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        if (&g - g.adjoint()).iter().any(|v| v.norm() > HERMITIAN_TOL * scale) {
            return Err(Error::PreconditionFailed("averaged potential is not self-adjoint".into()));
        }
        Ok(g)
    }
}

/// `|dH(σ)·λ| ≤ ADMISSIBILITY_TOL` for the generators of `Λ`.
pub fn check_admissible(model: &HamiltonianModel, sigma: &[f64], lambda: &SubmoduleBasis) -> Result<()> {
    if sigma.len() != lambda.dim() {
        return Err(Error::ShapeError("σ and Λ differ in dimension".into()));
    }
    let g = model.gradient(sigma)?;
    for c in lambda.columns_f64() {
        let p: f64 = c.iter().zip(&g).map(|(a, b)| a * b).sum();
        if p.abs() > ADMISSIBILITY_TOL {
            return Err(Error::PreconditionFailed(format!("dH(σ)·{c:?} = {p:.3e}, σ is not on I_Λ")));
        }
    }
    Ok(())
}

/// Spectral data of the limit generator, for repeated evolution.
#[derive(Debug, Clone)]
pub struct BlochEvolution {
    space: BlochSpace,
    generator: DMatrix<Complex64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl BlochEvolution {
    pub fn new(space: &BlochSpace, model: &HamiltonianModel, sigma: &[f64], potential: &PotentialSpec) -> Result<Self> {
        let generator = space.generator(model, sigma, potential)?;
        let n = generator.nrows();
        let diagonal = (0..n).all(|j| (0..n).all(|i| i == j || generator[(i, j)] == Complex64::new(0.0, 0.0)));
        let (eigenvalues, eigenvectors) = if diagonal {
            (DVector::from_fn(n, |i, _| generator[(i, i)].re), DMatrix::identity(n, n))
        } else {
            let e = generator.clone().symmetric_eigen();
            (e.eigenvalues, e.eigenvectors)
        };
        Ok(BlochEvolution {
            space: space.clone(),
            generator,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn space(&self) -> &BlochSpace {
        &self.space
    }

    pub fn generator(&self) -> &DMatrix<Complex64> {
        &self.generator
    }

    /// `U(t) = e^{−itG}`.
    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let phases = self.eigenvalues.map(|e| Complex64::from_polar(1.0, -t * e));
        let mut scaled = self.eigenvectors.clone();
        for (j, p) in phases.iter().enumerate() {
            scaled.column_mut(j).iter_mut().for_each(|v| *v *= p);
        }
        scaled * self.eigenvectors.adjoint()
    }

    pub fn propagate(&self, v: &DVector<Complex64>, t: f64) -> Result<DVector<Complex64>> {
        if v.len() != self.space.len() {
            return Err(Error::ShapeError(format!("vector of length {} on a window of {}", v.len(), self.space.len())));
        }
        let c = self.eigenvectors.adjoint() * v;
        let c = DVector::from_fn(c.len(), |i, _| c[i] * Complex64::from_polar(1.0, -t * self.eigenvalues[i]));
        Ok(&self.eigenvectors * c)
    }

    /// `U(t) M U(t)*`.
    pub fn conjugate(&self, m: &BlochDensityOperator, t: f64) -> Result<BlochDensityOperator> {
        if m.space != self.space {
            return Err(Error::ShapeError("density operator lives on another Bloch space".into()));
        }
        let u = self.unitary(t);
        let mut out = &u * &m.matrix * u.adjoint();
        let sym = (&out + out.adjoint()) * Complex64::new(0.5, 0.0);
        out = sym;
        Ok(BlochDensityOperator {
            space: m.space.clone(),
            matrix: out,
        })
    }
}

/// `e^{−itG} v` for the generator at `σ`.
pub fn bloch_propagate(
    space: &BlochSpace,
    v: &DVector<Complex64>,
    t: f64,
    model: &HamiltonianModel,
    sigma: &[f64],
    potential: &PotentialSpec,
) -> Result<DVector<Complex64>> {
    BlochEvolution::new(space, model, sigma, potential)?.propagate(v, t)
}

/// Nonnegative Hermitian matrix of unit trace on a Bloch window.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochDensityOperator {
    pub space: BlochSpace,
    pub matrix: DMatrix<Complex64>,
}

impl BlochDensityOperator {
    pub fn new(space: BlochSpace, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = space.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::ShapeError(format!(
                "{}×{} matrix on a window of {n} modes",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let m = BlochDensityOperator { space, matrix };
        m.validate()?;
        Ok(m)
    }

    /// `v v* / |v|²`.
    pub fn pure(space: BlochSpace, v: &DVector<Complex64>) -> Result<Self> {
        let n2 = v.norm_squared();
        if !(n2 > 0.0) || v.len() != space.len() {
            return Err(Error::PreconditionFailed("pure state needs a nonzero vector on the window".into()));
        }
        let m = v * v.adjoint() / Complex64::new(n2, 0.0);
        Self::new(space, m)
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn validate(&self) -> Result<()> {
        if (&self.matrix - self.matrix.adjoint()).iter().any(|v| v.norm() > HERMITIAN_TOL) {
            return Err(Error::PreconditionFailed("density operator is not Hermitian".into()));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::PreconditionFailed(format!("density operator has trace {tr}")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -POSITIVITY_TOL {
            return Err(Error::PreconditionFailed(format!("density operator has eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// `Tr(A M)`.
    pub fn pair(&self, a: &DMatrix<Complex64>) -> Result<Complex64> {
        if a.shape() != self.matrix.shape() {
            return Err(Error::ShapeError("observable and density operator differ in size".into()));
        }
        Ok((0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * self.matrix[(j, i)]).sum::<Complex64>())
            .sum())
    }
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    lambda_hnf: SubmoduleBasis,
    omega: Vec<f64>,
    window_radius: usize,
    matrix: Vec<[f64; 2]>,
}

impl Serialize for BlochDensityOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.matrix.nrows();
        DensityJson {
            lambda_hnf: self.space.lambda.clone(),
            omega: self.space.omega.clone(),
            window_radius: self.space.window_radius,
            matrix: (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| [self.matrix[(i, j)].re, self.matrix[(i, j)].im])
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlochDensityOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = DensityJson::deserialize(d)?;
        let space = BlochSpace::new(&j.lambda_hnf, &j.omega, j.window_radius).map_err(D::Error::custom)?;
        let n = space.len();
        if j.matrix.len() != n * n {
            return Err(D::Error::custom(format!("expected {} entries, found {}", n * n, j.matrix.len())));
        }
        let m = DMatrix::from_fn(n, n, |i, k| {
            let [re, im] = j.matrix[i * n + k];
            Complex64::new(re, im)
        });
        BlochDensityOperator::new(space, m).map_err(D::Error::custom)
    }
}

/// `Tr(A U(t) M0 U(t)*)` with `A` the multiplication by `⟨a⟩_Λ(·, σ)`.
pub fn heisenberg_trace_pairing_complex(
    m0: &BlochDensityOperator,
    t: f64,
    model: &HamiltonianModel,
    sigma: &[f64],
    potential: &PotentialSpec,
    a: &TorusSymbol,
) -> Result<Complex64> {
    let ev = BlochEvolution::new(&m0.space, model, sigma, potential)?;
    let a_mat = m0.space.multiplication_matrix(a, sigma)?;
    ev.conjugate(m0, t)?.pair(&a_mat)
}

/// Real part of [`heisenberg_trace_pairing_complex`]; exact for real symbols.
pub fn heisenberg_trace_pairing(
    m0: &BlochDensityOperator,
    t: f64,
    model: &HamiltonianModel,
    sigma: &[f64],
    potential: &PotentialSpec,
    a: &TorusSymbol,
) -> Result<f64> {
    Ok(heisenberg_trace_pairing_complex(m0, t, model, sigma, potential, a)?.re)
}
