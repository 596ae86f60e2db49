use crate::chart::ChartF;
use crate::window::MWindow;
use lattice_core::{Error, Result, SubmoduleBasis};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use torus_quantization::{FourierGrid, FourierState};

/// One coset `k + Λ` of grid modes with its point `σ ∈ I_Λ^h` and Bloch phase `ω_h(σ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KhFiber {
    /// Canonical HNF-reduced representative of the coset.
    pub coset_rep: Vec<i64>,
    pub sigma: Vec<f64>,
    pub omega: Vec<f64>,
    /// `(k, m(hk) û(k))` in grid order.
    pub modes: Vec<(Vec<i64>, Complex64)>,
}

impl KhFiber {
    /// Frequency `k − σ/h ∈ Λ − ω` of a fiber mode.
    pub fn frequency(&self, k: &[i64], h: f64) -> Vec<f64> {
        k.iter().zip(&self.sigma).map(|(a, s)| *a as f64 - s / h).collect()
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.modes.iter().map(|m| m.1).collect()
    }

    pub fn mass(&self) -> f64 {
        self.modes.iter().map(|m| m.1.norm_sqr()).sum()
    }

    /// `K_h u(σ, y) = (2π)^{−d/2} Σ_k m(hk) û(k) e^{i(k − σ/h)·y}`.
    pub fn eval(&self, y: &[f64], h: f64) -> Complex64 {
        let d = y.len();
        let s: Complex64 = self
            .modes
            .iter()
            .map(|(k, a)| {
                let ph: f64 = self.frequency(k, h).iter().zip(y).map(|(f, v)| f * v).sum();
                a * Complex64::from_polar(1.0, ph)
            })
            .sum();
        s / (2.0 * PI).powf(d as f64 / 2.0)
    }

    /// `∫_{T^d} |K_h u(σ, y)|² dy` by the trapezoid rule, exact for the trigonometric
    /// polynomial `|K_h u|²` once the sample count exceeds the mode spread. The common
    /// factor `e^{−iσ·y/h}` drops out of the modulus.
    pub fn torus_mass(&self) -> f64 {
        let d = self.sigma.len();
        if self.modes.is_empty() {
            return 0.0;
        }
        let lo: Vec<i64> = (0..d).map(|i| self.modes.iter().map(|m| m.0[i]).min().unwrap()).collect();
        let spread = (0..d)
            .map(|i| (self.modes.iter().map(|m| m.0[i]).max().unwrap() - lo[i]) as usize)
            .max()
            .unwrap();
        let m = 2 * spread + 2;
        let step = 2.0 * PI / m as f64;
        // table[o * m + j] = e^{i o j step}
        let table: Vec<Complex64> = (0..=spread)
            .flat_map(|o| (0..m).map(move |j| Complex64::from_polar(1.0, (o * j) as f64 * step)))
            .collect();
        let offsets: Vec<Vec<usize>> = self
            .modes
            .iter()
            .map(|(k, _)| k.iter().zip(&lo).map(|(a, b)| (a - b) as usize).collect())
            .collect();
        let total = m.pow(d as u32);
        let mut idx = vec![0usize; d];
        let mut acc = 0.0;
        for flat in 0..total {
            let mut r = flat;
            for v in idx.iter_mut() {
                *v = r % m;
                r /= m;
            }
            let mut s = Complex64::new(0.0, 0.0);
            for ((_, a), off) in self.modes.iter().zip(&offsets) {
                let mut t = *a;
                for (o, j) in off.iter().zip(&idx) {
                    t *= table[o * m + j];
                }
                s += t;
            }
            acc += s.norm_sqr();
        }
        acc * (step / (2.0 * PI)).powi(d as i32)
    }
}

/// The grid modes of a state grouped into `Λ`-cosets, windowed by `m(hk)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KhField {
    pub lambda: SubmoduleBasis,
    pub h: f64,
    pub fibers: Vec<KhFiber>,
}

/// Groups the modes with `m(hk) ≠ 0` by coset and attaches `σ` and `ω_h(σ)` from the chart.
pub fn kh_transform(u: &FourierState, chart: &ChartF, m: &MWindow) -> Result<KhField> {
    let lambda = chart.lambda().clone();
    if lambda.dim() != u.dim() {
        return Err(Error::ShapeError("state and Λ differ in dimension".into()));
    }
    let h = u.h();
    let mut groups: BTreeMap<Vec<i64>, Vec<(Vec<i64>, Complex64)>> = BTreeMap::new();
    let mut xi = vec![0.0; u.dim()];
    for (i, c) in u.coeffs.iter().enumerate() {
        let k = u.grid.mode(i);
        for (x, kk) in xi.iter_mut().zip(&k) {
            *x = h * *kk as f64;
        }
        let w = m.eval(&xi);
        if w == 0.0 {
            continue;
        }
        groups.entry(lambda.reduce_i64(&k)).or_default().push((k, c * w));
    }
    let mut fibers = Vec::with_capacity(groups.len());
    for (rep, modes) in groups {
        let xi: Vec<f64> = modes[0].0.iter().map(|v| h * *v as f64).collect();
        let sigma = chart.sigma(&xi)?;
        let omega = chart.bloch_phase(&sigma, h);
        fibers.push(KhFiber { coset_rep: rep, sigma, omega, modes });
    }
    Ok(KhField { lambda, h, fibers })
}

impl KhField {
    /// `Σ_σ ∫_{T^d} |K_h u(σ, y)|² dy`.
    pub fn plancherel_mass(&self) -> f64 {
        self.fibers.iter().map(|f| f.torus_mass()).sum()
    }

    /// Largest distance of `(k − σ/h) + ω` from `Λ`, in HNF coordinates.
    pub fn bloch_defect(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for f in &self.fibers {
            for (k, _) in &f.modes {
                let v: Vec<f64> = f.frequency(k, self.h).iter().zip(&f.omega).map(|(a, b)| a + b).collect();
                for c in self.lambda.coords(&v)? {
                    worst = worst.max((c - c.round()).abs());
                }
            }
        }
        Ok(worst)
    }

    /// The windowed state `m(hD) u` rebuilt on `grid`.
    pub fn to_state(&self, grid: &FourierGrid) -> Result<FourierState> {
        let mut out = FourierState::zeros(grid.clone());
        for f in &self.fibers {
            for (k, a) in &f.modes {
                let i = grid
                    .index(k)
                    .ok_or_else(|| Error::ShapeError(format!("mode {k:?} outside the target grid")))?;
                out.coeffs[i] = *a;
            }
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct FiberJson {
    coset_rep: Vec<i64>,
    sigma: Vec<f64>,
    omega: Vec<f64>,
    modes: Vec<(Vec<i64>, f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    lambda_hnf: SubmoduleBasis,
    h: f64,
    fibers: Vec<FiberJson>,
}

impl Serialize for KhField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldJson {
            lambda_hnf: self.lambda.clone(),
            h: self.h,
            fibers: self
                .fibers
                .iter()
                .map(|f| FiberJson {
                    coset_rep: f.coset_rep.clone(),
                    sigma: f.sigma.clone(),
                    omega: f.omega.clone(),
                    modes: f.modes.iter().map(|(k, a)| (k.clone(), a.re, a.im)).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KhField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FieldJson::deserialize(d)?;
        Ok(KhField {
            lambda: j.lambda_hnf,
            h: j.h,
            fibers: j
                .fibers
                .into_iter()
                .map(|f| KhFiber {
                    coset_rep: f.coset_rep,
                    sigma: f.sigma,
                    omega: f.omega,
                    modes: f.modes.into_iter().map(|(k, re, im)| (k, Complex64::new(re, im))).collect(),
                })
                .collect(),
        })
    }
}
