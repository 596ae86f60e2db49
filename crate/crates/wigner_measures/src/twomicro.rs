use crate::chart::ChartF;
use crate::window::chi;
use lattice_core::{Error, Result, SubmoduleBasis};
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;
use torus_quantization::{wigner_pairing, FourierState, ModeFn, TorusSymbol};

/// Coefficient `c_k(ξ, η)` of `e^{ik·x}`.
pub type CoreFn = Arc<dyn Fn(&[f64], &[f64]) -> Complex64 + Send + Sync>;

/// `a(x, ξ, η) = Σ_{k∈Λ} c_k(ξ, η) e^{ik·x}`, homogeneous of degree zero in `η` for `|η| > R0`,
/// with `ξ`-support inside `B(support_center, support_radius)`.
#[derive(Clone)]
pub struct TwoMicroSymbol {
    lambda: SubmoduleBasis,
    modes: Vec<Vec<i64>>,
    core: Vec<CoreFn>,
    /// `c_k^hom(ξ, ω)` on the unit sphere of `⟨Λ⟩`.
    hom: Vec<CoreFn>,
    r0: f64,
    support_center: Vec<f64>,
    support_radius: f64,
}

impl fmt::Debug for TwoMicroSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoMicroSymbol")
            .field("modes", &self.modes)
            .field("r0", &self.r0)
            .field("support_center", &self.support_center)
            .field("support_radius", &self.support_radius)
            .finish()
    }
}

/// Mode entry: `(k, core, hom)`.
pub type TwoMicroEntry = (Vec<i64>, CoreFn, CoreFn);

impl TwoMicroSymbol {
    pub fn new(
        lambda: &SubmoduleBasis,
        entries: Vec<TwoMicroEntry>,
        r0: f64,
        support_center: &[f64],
        support_radius: f64,
    ) -> Result<Self> {
        let d = lambda.dim();
        let mut modes = Vec::new();
        let mut core = Vec::new();
        let mut hom = Vec::new();
        for (k, c, hf) in entries {
            if k.len() != d {
                return Err(Error::ShapeError(format!("mode {k:?} in dimension {d}")));
            }
            if !lambda.contains_i64(&k) {
                return Err(Error::PreconditionFailed(format!("x-mode {k:?} is not in Λ")));
            }
            modes.push(k);
            core.push(c);
            hom.push(hf);
        }
        if support_center.len() != d || !(support_radius > 0.0) || !(r0 >= 0.0) {
            return Err(Error::ShapeError("bad support ball or matching radius".into()));
        }
        Ok(TwoMicroSymbol {
            lambda: lambda.clone(),
            modes,
            core,
            hom,
            r0,
            support_center: support_center.to_vec(),
            support_radius,
        })
    }

    /// `Σ_k c_k e^{ik·x} · g(ξ) · ψ(η)` with `ψ(η) = ψ_hom(η/|η|)` for `|η| > R0`.
    pub fn separable(
        lambda: &SubmoduleBasis,
        terms: &[(Vec<i64>, Complex64)],
        g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        psi: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        psi_hom: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        r0: f64,
        support_center: &[f64],
        support_radius: f64,
    ) -> Result<Self> {
        let g: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> = Arc::new(g);
        let psi: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> = Arc::new(psi);
        let psi_hom: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> = Arc::new(psi_hom);
        let entries = terms
            .iter()
            .map(|(k, c)| {
                let (c, g1, g2, p, ph) = (*c, g.clone(), g.clone(), psi.clone(), psi_hom.clone());
                let core: CoreFn = Arc::new(move |xi, eta| c * g1(xi) * p(eta));
                let hom: CoreFn = Arc::new(move |xi, w| c * g2(xi) * ph(w));
                (k.clone(), core, hom)
            })
            .collect();
        TwoMicroSymbol::new(lambda, entries, r0, support_center, support_radius)
    }

    /// An ordinary symbol with modes in `Λ`, constant in `η`.
    pub fn from_torus(lambda: &SubmoduleBasis, a: &TorusSymbol, support_center: &[f64], support_radius: f64) -> Result<Self> {
        let entries = (0..a.modes().len())
            .map(|i| {
                let (a1, a2) = (a.clone(), a.clone());
                let core: CoreFn = Arc::new(move |xi, _| a1.coeff(i, xi));
                let hom: CoreFn = Arc::new(move |xi, _| a2.coeff(i, xi));
                (a.modes()[i].clone(), core, hom)
            })
            .collect();
        TwoMicroSymbol::new(lambda, entries, 0.0, support_center, support_radius)
    }

    pub fn dim(&self) -> usize {
        self.lambda.dim()
    }

    pub fn lambda(&self) -> &SubmoduleBasis {
        &self.lambda
    }

    pub fn modes(&self) -> &[Vec<i64>] {
        &self.modes
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn support(&self) -> (&[f64], f64) {
        (&self.support_center, self.support_radius)
    }

    pub fn in_support(&self, xi: &[f64]) -> bool {
        let r = xi.iter().zip(&self.support_center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        r < self.support_radius
    }

    pub fn core(&self, i: usize, xi: &[f64], eta: &[f64]) -> Complex64 {
        if !self.in_support(xi) {
            return Complex64::new(0.0, 0.0);
        }
        (self.core[i])(xi, eta)
    }

    pub fn hom(&self, i: usize, xi: &[f64], omega: &[f64]) -> Complex64 {
        if !self.in_support(xi) {
            return Complex64::new(0.0, 0.0);
        }
        (self.hom[i])(xi, omega)
    }

    /// `a(x, ξ, η)`.
    pub fn eval(&self, x: &[f64], xi: &[f64], eta: &[f64]) -> Complex64 {
        self.modes
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let phase: f64 = k.iter().zip(x).map(|(a, b)| *a as f64 * b).sum();
                self.core(i, xi, eta) * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    /// Largest `|core(ξ, η) − hom(ξ, η/|η|)|` over the sample points with `|η| > R0`.
    pub fn homogeneity_defect(&self, samples: &[(Vec<f64>, Vec<f64>)]) -> f64 {
        let mut worst = 0.0f64;
        for (xi, eta) in samples {
            let n = eta.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n <= self.r0 {
                continue;
            }
            let w: Vec<f64> = eta.iter().map(|v| v / n).collect();
            for i in 0..self.modes.len() {
                worst = worst.max((self.core(i, xi, eta) - self.hom(i, xi, &w)).norm());
            }
        }
        worst
    }

    /// Multiplies `c_k(ξ, η)` by `f(k, ξ, η)` and `c_k^hom(ξ, ω)` by `f_hom(k, ξ, ω)`.
    pub fn map_modes(
        &self,
        f: impl Fn(&[i64], &[f64], &[f64]) -> Complex64 + Send + Sync + 'static,
        f_hom: impl Fn(&[i64], &[f64], &[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        let f = Arc::new(f);
        let f_hom = Arc::new(f_hom);
        let mut out = self.clone();
        for i in 0..self.modes.len() {
            let k = self.modes[i].clone();
            let (c, h) = (self.core[i].clone(), self.hom[i].clone());
            let (f, fh, k2) = (f.clone(), f_hom.clone(), k.clone());
            out.core[i] = Arc::new(move |xi, eta| c(xi, eta) * f(&k, xi, eta));
            out.hom[i] = Arc::new(move |xi, w| h(xi, w) * fh(&k2, xi, w));
        }
        out
    }
}

/// Which piece of the cutoff split `a = a₁ + a₂ + a₃` to quantize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffPart {
    /// `a₁ = a (1 − χ(η/R)) (1 − χ(η(ξ)/δ))`.
    Outer,
    /// `a₂ = a (1 − χ(η/R)) χ(η(ξ)/δ)`.
    Sphere,
    /// `a₃ = a χ(η/R)`.
    Compact,
    /// `a` itself.
    Full,
}

/// Parameters of the substitution `η ↦ τ η(ξ)` and of the cutoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    pub tau: f64,
    pub r: f64,
    pub delta: f64,
}

fn part_factor(part: CutoffPart, eta: &[f64], s: Scales) -> f64 {
    let scaled: Vec<f64> = eta.iter().map(|v| s.tau * v / s.r).collect();
    let small: Vec<f64> = eta.iter().map(|v| v / s.delta).collect();
    match part {
        CutoffPart::Full => 1.0,
        CutoffPart::Compact => chi(&scaled),
        CutoffPart::Sphere => (1.0 - chi(&scaled)) * chi(&small),
        CutoffPart::Outer => (1.0 - chi(&scaled)) * (1.0 - chi(&small)),
    }
}

/// The ordinary symbol `a_part(x, ξ, τ η(ξ))`. The support ball of `a` must lie in the chart domain.
pub fn substituted_symbol(a: &TwoMicroSymbol, chart: &ChartF, part: CutoffPart, s: Scales) -> Result<TorusSymbol> {
    let (c, r) = a.support();
    let reach = c.iter().zip(chart.center()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt() + r;
    if reach > chart.radius() / 2.0 {
        return Err(Error::OutOfChart { distance: reach, radius: chart.radius() / 2.0 });
    }
    if chart.lambda() != a.lambda() {
        return Err(Error::PreconditionFailed("symbol and chart use different Λ".into()));
    }
    let shared = Arc::new((a.clone(), chart.clone()));
    let entries: Vec<(Vec<i64>, ModeFn)> = (0..a.modes().len())
        .map(|i| {
            let shared = shared.clone();
            let f: ModeFn = Arc::new(move |xi: &[f64]| {
                let (a, chart) = (&shared.0, &shared.1);
                if !a.in_support(xi) {
                    return Complex64::new(0.0, 0.0);
                }
                let Ok((_, eta)) = chart.decompose(xi) else {
                    return Complex64::new(0.0, 0.0);
                };
                let factor = part_factor(part, &eta, s);
                if factor == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let te: Vec<f64> = eta.iter().map(|v| s.tau * v).collect();
                a.core(i, xi, &te) * factor
            });
            (a.modes()[i].clone(), f)
        })
        .collect();
    TorusSymbol::from_fns(a.dim(), entries)
}

/// `(compact, sphere, outer)` pairings of the cutoff split.
pub fn two_micro_pairing(
    u: &FourierState,
    a: &TwoMicroSymbol,
    chart: &ChartF,
    tau: f64,
    r: f64,
    delta: f64,
) -> Result<(f64, f64, f64)> {
    if !(tau > 0.0 && r > 0.0 && delta > 0.0) {
        return Err(Error::PreconditionFailed(format!("need τ, R, δ > 0, got {tau}, {r}, {delta}")));
    }
    let s = Scales { tau, r, delta };
    let pair = |part| -> Result<f64> { wigner_pairing(u, &substituted_symbol(a, chart, part, s)?) };
    Ok((pair(CutoffPart::Compact)?, pair(CutoffPart::Sphere)?, pair(CutoffPart::Outer)?))
}

/// Pairing with the full substituted symbol `a(x, ξ, τ η(ξ))`.
pub fn full_pairing(u: &FourierState, a: &TwoMicroSymbol, chart: &ChartF, tau: f64) -> Result<f64> {
    let s = Scales { tau, r: 1.0, delta: 1.0 };
    wigner_pairing(u, &substituted_symbol(a, chart, CutoffPart::Full, s)?)
}
