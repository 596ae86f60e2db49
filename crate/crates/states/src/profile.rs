use lattice_core::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Coefficient mass tolerated outside the grid for generated states.
pub const TAIL_TOL: f64 = 1e-14;

/// Nodes for the bump's Fourier quadrature.
const BUMP_NODES: usize = 1024;

/// Profile `ρ` with `‖ρ‖_{L²(R^d)} = 1`, given as a product of identical 1-d factors.
/// In configs either the name `"gaussian"` or a table `{ kind = "compact_bump", radius = 1.0 }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub enum ProfileSpec {
    /// `π^{−1/4} e^{−t²/2}` per axis.
    #[default]
    Gaussian,
    /// `c · exp(−1/(1 − (t/radius)²))` on `|t| < radius` per axis.
    CompactBump { radius: f64 },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ProfileRepr {
    Name(String),
    Table {
        kind: String,
        #[serde(default)]
        radius: Option<f64>,
    },
}

impl TryFrom<ProfileRepr> for ProfileSpec {
    type Error = Error;

    fn try_from(r: ProfileRepr) -> Result<Self> {
        let (kind, radius) = match r {
            ProfileRepr::Name(n) => (n, None),
            ProfileRepr::Table { kind, radius } => (kind, radius),
        };
        let p = match kind.as_str() {
            "gaussian" => ProfileSpec::Gaussian,
            "compact_bump" => ProfileSpec::CompactBump { radius: radius.unwrap_or(1.0) },
            other => return Err(Error::ConfigError(format!("unknown profile {other:?}"))),
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<ProfileSpec> for ProfileRepr {
    fn from(p: ProfileSpec) -> Self {
        match p {
            ProfileSpec::Gaussian => ProfileRepr::Name("gaussian".into()),
            ProfileSpec::CompactBump { radius } => ProfileRepr::Table {
                kind: "compact_bump".into(),
                radius: Some(radius),
            },
        }
    }
}

fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// `(∫ bump²)^{1/2}` on `[−1, 1]`.
fn bump_l2() -> f64 {
    static L2: OnceLock<f64> = OnceLock::new();
    *L2.get_or_init(|| {
        let n = BUMP_NODES;
        let step = 2.0 / n as f64;
        let s: f64 = (0..n).map(|i| bump(-1.0 + i as f64 * step).powi(2)).sum();
        (s * step).sqrt()
    })
}

impl ProfileSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProfileSpec::Gaussian => Ok(()),
            ProfileSpec::CompactBump { radius } if *radius > 0.0 => Ok(()),
            ProfileSpec::CompactBump { radius } => {
                Err(Error::InvalidRecipe(format!("bump radius must be positive, got {radius}")))
            }
        }
    }

    /// The 1-d factor `ρ₁(t)`.
    pub fn value_1d(&self, t: f64) -> f64 {
        match self {
            ProfileSpec::Gaussian => PI.powf(-0.25) * (-t * t / 2.0).exp(),
            ProfileSpec::CompactBump { radius } => bump(t / radius) / (bump_l2() * radius.sqrt()),
        }
    }

    /// Unitary Fourier transform `(2π)^{−1/2} ∫ ρ₁(t) e^{−iζt} dt` of the 1-d factor (real, even).
    pub fn hat_1d(&self, zeta: f64) -> f64 {
        match self {
            ProfileSpec::Gaussian => PI.powf(-0.25) * (-zeta * zeta / 2.0).exp(),
            ProfileSpec::CompactBump { radius } => {
                // trapezoid on the support; the integrand is flat to all orders at the ends
                let z = zeta * radius;
                let n = BUMP_NODES.max((8.0 * z.abs()) as usize);
                let step = 2.0 / n as f64;
                let s: f64 = (0..n)
                    .map(|i| {
                        let t = -1.0 + i as f64 * step;
                        bump(t) * (z * t).cos()
                    })
                    .sum();
                s * step * radius.sqrt() / (bump_l2() * (2.0 * PI).sqrt())
            }
        }
    }

    /// `Z` with `∫_{|ζ|>Z} |ρ̂₁|² < tol`.
    pub fn tail_radius(&self, tol: f64) -> f64 {
        match self {
            ProfileSpec::Gaussian => {
                // ∫_{|ζ|>Z} π^{−1/2} e^{−ζ²} = erfc(Z) ≤ e^{−Z²} / (Z√π)
                let mut z = 1.0f64;
                while (-z * z).exp() / (z * PI.sqrt()) >= tol {
                    z += 0.05;
                }
                z
            }
            ProfileSpec::CompactBump { radius } => {
                // tabulate the tail from far out inwards on a graded mesh
                let zmax: f64 = 20000.0 / radius;
                let mut tail = 0.0;
                let mut z = zmax;
                while z > 0.25 {
                    let step = (0.01 * z).max(0.25);
                    tail += 2.0 * self.hat_1d(z).powi(2) * step;
                    if tail >= tol {
                        return z + step;
                    }
                    z -= step;
                }
                0.25
            }
        }
    }
}
