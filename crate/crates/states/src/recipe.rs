use crate::cluster::{eigenfunction_cluster, oscillation_tails, OscillationRow, LEVEL_TOL};
use crate::coherent::{coherent_grid, coherent_state, modulated_coherent_state, Built};
use crate::profile::ProfileSpec;
use crate::special::{example3, lagrangian_diag, power_quasimode, wunsch};
use hamiltonians::HamiltonianModel;
use lattice_core::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use torus_quantization::{FourierGrid, FourierState};

/// `coeff · h^exponent`, written `"h^0.5"`, `"10*h^0.25"`, `"h"` or a plain number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub coeff: f64,
    pub exponent: f64,
}

impl PowerLaw {
    pub fn new(coeff: f64, exponent: f64) -> Self {
        PowerLaw { coeff, exponent }
    }

    pub fn eval(&self, h: f64) -> f64 {
        self.coeff * h.powf(self.exponent)
    }
}

impl fmt::Display for PowerLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.coeff == 1.0, self.exponent == 0.0) {
            (_, true) => write!(f, "{}", self.coeff),
            (true, false) => write!(f, "h^{}", self.exponent),
            (false, false) => write!(f, "{}*h^{}", self.coeff, self.exponent),
        }
    }
}

impl FromStr for PowerLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ConfigError(format!("cannot read power law {s:?}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (coeff, rest) = match t.split_once('*') {
            Some((c, r)) => (c.parse::<f64>().map_err(|_| bad())?, r.to_string()),
            None if t.starts_with('h') => (1.0, t.clone()),
            None => return Ok(PowerLaw::new(t.parse().map_err(|_| bad())?, 0.0)),
        };
        let exponent = match rest.strip_prefix('h') {
            Some("") => 1.0,
            Some(e) => e
                .strip_prefix('^')
                .ok_or_else(bad)?
                .trim_matches(|c| c == '(' || c == ')')
                .parse()
                .map_err(|_| bad())?,
            None => return Err(bad()),
        };
        Ok(PowerLaw::new(coeff, exponent))
    }
}

impl Serialize for PowerLaw {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PowerLaw {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(PowerLaw::new(v, 0.0)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn default_example3_eps() -> PowerLaw {
    PowerLaw::new(1.0, 0.5)
}

/// Initial-data family with its parameters, resolved at a given `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateRecipe {
    Coherent {
        x0: Vec<f64>,
        xi0: Vec<f64>,
        eps: PowerLaw,
        #[serde(default)]
        profile: ProfileSpec,
    },
    Modulated {
        x0: Vec<f64>,
        xi0: Vec<f64>,
        eta0: Vec<f64>,
        eps: PowerLaw,
        tau: PowerLaw,
        #[serde(default)]
        profile: ProfileSpec,
    },
    LagrangianDiag {
        #[serde(default)]
        profile: ProfileSpec,
    },
    Example3 {
        alpha: f64,
        #[serde(default = "default_example3_eps")]
        eps: PowerLaw,
        #[serde(default)]
        profile: ProfileSpec,
    },
    Wunsch {
        eps: f64,
    },
    PowerQuasimode {
        xi0: Vec<f64>,
        eps: PowerLaw,
    },
    Cluster {
        energy: f64,
        dim: usize,
        radius: usize,
    },
    PlaneWave {
        k: Vec<i64>,
    },
}

impl StateRecipe {
    pub fn dim(&self) -> usize {
        match self {
            StateRecipe::Coherent { xi0, .. }
            | StateRecipe::Modulated { xi0, .. }
            | StateRecipe::PowerQuasimode { xi0, .. } => xi0.len(),
            StateRecipe::LagrangianDiag { .. } | StateRecipe::Wunsch { .. } => 2,
            StateRecipe::Example3 { .. } => 3,
            StateRecipe::Cluster { dim, .. } => *dim,
            StateRecipe::PlaneWave { k } => k.len(),
        }
    }

    /// Builds the state at `h`; `model` is only used by the cluster family.
    pub fn resolve(&self, h: f64, model: &HamiltonianModel) -> Result<Built> {
        if !(h > 0.0) {
            return Err(Error::InvalidRecipe(format!("h must be positive, got {h}")));
        }
        match self {
            StateRecipe::Coherent { x0, xi0, eps, profile } => {
                let e = eps.eval(h);
                let grid = coherent_grid(xi0, e, h, profile)?;
                coherent_state(x0, xi0, e, profile, &grid)
            }
            StateRecipe::Modulated { x0, xi0, eta0, eps, tau, profile } => {
                let (e, t) = (eps.eval(h), tau.eval(h));
                if eta0.len() != xi0.len() {
                    return Err(Error::InvalidRecipe("η0 and ξ0 differ in dimension".into()));
                }
                let center: Vec<f64> = xi0.iter().zip(eta0).map(|(a, b)| a + b / t).collect();
                let grid = coherent_grid(&center, e, h, profile)?;
                modulated_coherent_state(x0, xi0, eta0, e, t, profile, &grid)
            }
            StateRecipe::LagrangianDiag { profile } => lagrangian_diag(profile, h),
            StateRecipe::Example3 { alpha, eps, profile } => example3(*alpha, eps.eval(h), profile, h),
            StateRecipe::Wunsch { eps } => wunsch(*eps, h),
            StateRecipe::PowerQuasimode { xi0, eps } => power_quasimode(xi0, eps.eval(h), h),
            StateRecipe::Cluster { energy, dim, radius } => {
                let grid = FourierGrid::new(*dim, *radius, h)?;
                let state = eigenfunction_cluster(*energy, &grid, model, None, LEVEL_TOL)?;
                Ok(Built { state, raw_norm: 1.0 })
            }
            StateRecipe::PlaneWave { k } => {
                let grid = FourierGrid::centered(k.clone(), 1, h)?;
                let state = FourierState::plane_wave(grid, k)?;
                Ok(Built { state, raw_norm: 1.0 })
            }
        }
    }
}

/// Tail masses with `|hk|² ≥ R` for every `(h, R)`.
pub fn oscillation_profile(
    recipe: &StateRecipe,
    model: &HamiltonianModel,
    h_list: &[f64],
    r_list: &[f64],
) -> Result<Vec<OscillationRow>> {
    let mut rows = Vec::new();
    for &h in h_list {
        let built = recipe.resolve(h, model)?;
        rows.extend(oscillation_tails(&built.state, r_list));
    }
    Ok(rows)
}
