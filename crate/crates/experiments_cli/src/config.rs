use hamiltonians::HamiltonianModel;
use lattice_core::rational::parse_rational;
use lattice_core::{Error, ResonanceMode, Result, SubmoduleBasis};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use states::{PowerLaw, StateRecipe};
use torus_quantization::{PotentialSpec, TimeWindow, TorusSymbol};

/// Integer or `"p/q"` entry of a rational matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalEntry {
    Int(i64),
    Text(String),
}

impl RationalEntry {
    fn parse(&self) -> Result<num_rational::BigRational> {
        match self {
            RationalEntry::Int(v) => Ok(lattice_core::ratio(*v, 1)),
            RationalEntry::Text(s) => parse_rational(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// `½|ξ|²`.
    HalfLaplacian { dim: usize },
    /// `½ A(ξ+θ)·(ξ+θ)`.
    Quadratic {
        a: Vec<Vec<RationalEntry>>,
        #[serde(default)]
        theta: Option<Vec<RationalEntry>>,
    },
    Power { alpha: f64 },
    Linear { omega: Vec<f64> },
    Saddle2d,
    Cubic3d,
}

impl ModelSpec {
    pub fn build(&self) -> Result<HamiltonianModel> {
        Ok(match self {
            ModelSpec::HalfLaplacian { dim } => HamiltonianModel::half_laplacian(*dim),
            ModelSpec::Quadratic { a, theta } => {
                let d = a.len();
                if d == 0 || a.iter().any(|r| r.len() != d) {
                    return Err(Error::ConfigError("quadratic form must be a nonempty square matrix".into()));
                }
                let a = a.iter().map(|r| r.iter().map(|v| v.parse()).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
                for i in 0..d {
                    for j in 0..i {
                        if a[i][j] != a[j][i] {
                            return Err(Error::ConfigError("quadratic form must be symmetric".into()));
                        }
                    }
                }
                let theta = match theta {
                    Some(t) if t.len() == d => t.iter().map(|v| v.parse()).collect::<Result<Vec<_>>>()?,
                    Some(_) => return Err(Error::ConfigError("θ has the wrong dimension".into())),
                    None => vec![lattice_core::ratio(0, 1); d],
                };
                HamiltonianModel::Quadratic { a, theta }
            }
            ModelSpec::Power { alpha } => HamiltonianModel::Power { alpha: *alpha },
            ModelSpec::Linear { omega } => HamiltonianModel::Linear { omega: omega.clone() },
            ModelSpec::Saddle2d => HamiltonianModel::Saddle2d,
            ModelSpec::Cubic3d => HamiltonianModel::Cubic3d,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosTerm {
    pub mode: Vec<i64>,
    pub amp: f64,
}

/// The potential `V` of `ih∂_t u = H(hD)u + h²V u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    #[default]
    Zero,
    /// `Σ amp cos(mode·x)`.
    Cos { terms: Vec<CosTerm> },
    /// `h^{−2ε} W(x₂)` for the Wunsch family.
    Wunsch { eps: f64 },
}

impl PotentialConfig {
    pub fn symbol(&self, dim: usize) -> Result<Option<TorusSymbol>> {
        match self {
            PotentialConfig::Zero => Ok(None),
            PotentialConfig::Cos { terms } => {
                let mut acc: Option<TorusSymbol> = None;
                for t in terms {
                    if t.mode.len() != dim {
                        return Err(Error::ConfigError(format!("potential mode {:?} in dimension {dim}", t.mode)));
                    }
                    let s = TorusSymbol::cos_mode(&t.mode, t.amp)?;
                    acc = Some(match acc {
                        Some(a) => a.add(&s)?,
                        None => s,
                    });
                }
                Ok(acc)
            }
            PotentialConfig::Wunsch { .. } => Err(Error::ConfigError("the Wunsch potential depends on h".into())),
        }
    }

    pub fn build(&self, dim: usize, h: f64) -> Result<PotentialSpec> {
        match self {
            PotentialConfig::Wunsch { eps } => Ok(PotentialSpec::multiplication(states::wunsch_potential(*eps, h)?)),
            _ => Ok(self.symbol(dim)?.map_or(PotentialSpec::Zero, PotentialSpec::multiplication)),
        }
    }
}

/// `cos(m·x) · exp(−|ξ − c|²/(2w²))` for every listed mode `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelSpec {
    pub modes: Vec<Vec<i64>>,
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    #[serde(default = "one")]
    pub width: f64,
}

fn one() -> f64 {
    1.0
}

impl PanelSpec {
    pub fn build(&self, default_center: &[f64]) -> Result<Vec<(String, TorusSymbol)>> {
        let c = self.center.clone().unwrap_or_else(|| default_center.to_vec());
        let w = self.width;
        if !(w > 0.0) {
            return Err(Error::ConfigError("panel width must be positive".into()));
        }
        self.modes
            .iter()
            .map(|m| {
                if m.len() != c.len() {
                    return Err(Error::ConfigError(format!("panel mode {m:?} in dimension {}", c.len())));
                }
                let c = c.clone();
                let g = move |xi: &[f64]| {
                    let r2: f64 = xi.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
                    Complex64::new((-r2 / (2.0 * w * w)).exp(), 0.0)
                };
                Ok((format!("cos{m:?}").replace(' ', ""), TorusSymbol::cos_mode(m, 1.0)?.times_xi(g)))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig { start: 0.0, end: 1.0, samples: 256 }
    }
}

impl WindowConfig {
    pub fn build(&self) -> Result<TimeWindow> {
        TimeWindow::new(self.start, self.end, self.samples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceConfig {
    pub qmax: i64,
    pub tol: f64,
}

impl Default for ResonanceConfig {
    fn default() -> Self {
        ResonanceConfig { qmax: 50, tol: 1e-9 }
    }
}

impl ResonanceConfig {
    pub fn mode(&self) -> ResonanceMode {
        ResonanceMode::Detect { qmax: self.qmax, tol: self.tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSection {
    #[serde(default = "default_scale_ratio")]
    pub min_scale_ratio: f64,
    /// Compare pointwise in time against `a(x0 + t dH(ξ0), ξ0)` instead of the orbit average.
    #[serde(default)]
    pub pointwise: bool,
}

fn default_scale_ratio() -> f64 {
    10.0
}

impl Default for OrbitSection {
    fn default() -> Self {
        OrbitSection { min_scale_ratio: default_scale_ratio(), pointwise: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftSection {
    pub times: Vec<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_resolution() -> usize {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSection {
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_betas() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}

impl Default for ThresholdSection {
    fn default() -> Self {
        ThresholdSection { betas: default_betas(), resolution: default_resolution() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitSection {
    /// Generators of `Λ`.
    pub lambda: Vec<Vec<i64>>,
    pub times: Vec<f64>,
    #[serde(default = "default_bloch_radius")]
    pub window_radius: usize,
    pub chart_radius: f64,
    /// Radius `R` of the compact cutoff `χ(η/R)`.
    pub cutoff: f64,
    /// Extra grid radius added around the initial state before propagation.
    #[serde(default = "default_pad")]
    pub pad: usize,
    /// `η` profile width of the panel: `ψ(η) = exp(−|η|²/(2w²))`.
    #[serde(default = "default_eta_width")]
    pub eta_width: f64,
    /// `ξ` support radius of the panel symbols.
    pub support_radius: f64,
    /// Panel x-modes; those outside `Λ` are reported as a separate trend.
    pub modes: Vec<Vec<i64>>,
}

fn default_bloch_radius() -> usize {
    limit_models::DEFAULT_WINDOW_RADIUS
}

fn default_pad() -> usize {
    8
}

fn default_eta_width() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    /// `[lo, hi]` per axis, in radians; `hi − lo ≥ 2π` means the whole circle.
    pub ranges: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservabilitySection {
    /// Disjoint boxes whose union is `U`.
    pub boxes: Vec<BoxSpec>,
    pub chi_center: Vec<f64>,
    pub chi_radius: f64,
    pub horizon: f64,
    #[serde(default = "default_draws")]
    pub draws: usize,
    #[serde(default)]
    pub adversarial: Vec<StateRecipe>,
    /// Use single plane waves on the χ-window instead of random draws.
    #[serde(default)]
    pub plane_waves: bool,
}

fn default_draws() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacingSection {
    /// Energy window `O = (lo, hi)`.
    pub energy_window: [f64; 2],
    pub radius: usize,
    /// Cluster data compared against its own time average.
    #[serde(default)]
    pub cluster_energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CounterexampleCase {
    /// Degenerate critical point of `|ξ|^α`; mass in the ball `|x − x0| < radius`.
    PowerQuasimode { xi0: Vec<f64>, eps: PowerLaw, tau: PowerLaw, radius: f64, resolution: usize },
    /// Mass in `|x₂| < radius`, propagated in the transverse variable alone.
    Wunsch { eps: f64, tau: PowerLaw, radius: f64, dt: PowerLaw },
    /// Saddle eigenfunction; mass in `|x₁ − x₂| < radius`.
    SaddleDiagonal { radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleSection {
    pub cases: Vec<CounterexampleCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KhCase {
    pub lambda: Vec<Vec<i64>>,
    /// A point of `I_Λ`; the chart is centered here.
    pub center: Vec<f64>,
}

/// Plancherel, Bloch periodicity and rebuild of `K_h` over seeded random states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KhCheck {
    pub cases: Vec<KhCase>,
    #[serde(default = "default_states")]
    pub states: usize,
    pub chart_radius: f64,
}

/// Symbol `cos(m·x) g(ξ) ψ(η)` tested against a flow of the two-microlocal calculus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowCheck {
    pub lambda: Vec<Vec<i64>>,
    pub mode: Vec<i64>,
    pub times: Vec<f64>,
    pub cutoff: f64,
    #[serde(default = "one")]
    pub delta: f64,
    pub chart_radius: f64,
    pub support_radius: f64,
    /// Width of the Gaussian `ψ`; absent means `ψ ≡ 1`.
    #[serde(default)]
    pub eta_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    #[serde(default)]
    pub kh: Option<KhCheck>,
    /// Time-averaged sphere part against its `φ¹_s` pullback.
    #[serde(default)]
    pub invariance: Option<FlowCheck>,
    /// Compact part of `u(t)` against the `φ̃¹_t` pullback at time zero.
    #[serde(default)]
    pub transport: Option<FlowCheck>,
}

fn default_states() -> usize {
    20
}

fn default_dt() -> PowerLaw {
    PowerLaw::new(1e-3, 0.0)
}

/// One experiment: model, data, `h` sweep, time scale and command-specific sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub state: Option<StateRecipe>,
    pub h_list: Vec<f64>,
    #[serde(default)]
    pub tau: Option<PowerLaw>,
    #[serde(default)]
    pub window: WindowConfig,
    /// Split-step size, as a law in `h`.
    #[serde(default = "default_dt")]
    pub dt: PowerLaw,
    #[serde(default)]
    pub potential: PotentialConfig,
    #[serde(default)]
    pub panel: Option<PanelSpec>,
    #[serde(default)]
    pub resonance: ResonanceConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub write_densities: bool,
    #[serde(default)]
    pub orbit: OrbitSection,
    #[serde(default)]
    pub drift: Option<DriftSection>,
    #[serde(default)]
    pub threshold: ThresholdSection,
    #[serde(default)]
    pub limit: Option<LimitSection>,
    #[serde(default)]
    pub observability: Option<ObservabilitySection>,
    #[serde(default)]
    pub spacing: Option<SpacingSection>,
    #[serde(default)]
    pub counterexamples: Option<CounterexampleSection>,
    #[serde(default)]
    pub diagnostics: Option<DiagnosticsSection>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: ExperimentConfig = toml::from_str(text).map_err(|e| Error::ConfigError(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h_list.is_empty() {
            return Err(Error::ConfigError("h_list is empty".into()));
        }
        for h in &self.h_list {
            let p = -h.log2();
            if !(*h > 0.0) || p.fract() != 0.0 {
                return Err(Error::ConfigError(format!("h = {h} is not a power of two")));
            }
        }
        if self.h_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::ConfigError("h_list must be strictly decreasing".into()));
        }
        if let Some(t) = &self.tau {
            if t.exponent > 0.0 || !(t.coeff > 0.0) {
                return Err(Error::ConfigError(format!("τ law {t} must be c·h^−β with β ≥ 0")));
            }
        }
        if self.threshold.betas.iter().any(|b| *b < 0.0) {
            return Err(Error::ConfigError("β must be nonnegative".into()));
        }
        self.model.build()?;
        Ok(())
    }

    pub fn model(&self) -> Result<HamiltonianModel> {
        self.model.build()
    }

    pub fn state(&self) -> Result<&StateRecipe> {
        self.state.as_ref().ok_or_else(|| Error::ConfigError("missing [state] section".into()))
    }

    pub fn tau_law(&self) -> Result<PowerLaw> {
        self.tau.ok_or_else(|| Error::ConfigError("missing τ law".into()))
    }

    pub fn section<'a, T>(&self, s: &'a Option<T>, name: &str) -> Result<&'a T> {
        s.as_ref().ok_or_else(|| Error::ConfigError(format!("missing [{name}] section")))
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("configs serialize");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn lattice(d: usize, cols: &[Vec<i64>]) -> Result<SubmoduleBasis> {
    SubmoduleBasis::from_i64(d, cols)
}
