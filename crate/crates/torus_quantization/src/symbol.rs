use hamiltonians::HamiltonianModel;
use lattice_core::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// ξ-dependent coefficient of one Fourier mode in x.
pub type ModeFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// One factor of a closed-form mode coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Factor {
    /// `exp(−|ξ − center|² / (2 width²))`
    Gaussian { center: Vec<f64>, width: f64 },
    /// `Σ c · ξ^α` over `(c, α)`
    Polynomial { terms: Vec<(f64, Vec<u32>)> },
    /// `cos(freq·ξ + phase)`
    Cos { freq: Vec<f64>, phase: f64 },
    /// `exp(i(freq·ξ + phase))`
    Phase { freq: Vec<f64>, phase: f64 },
}

impl Factor {
    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        match self {
            Factor::Gaussian { center, width } => {
                let r2: f64 = xi.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                Complex64::new((-r2 / (2.0 * width * width)).exp(), 0.0)
            }
            Factor::Polynomial { terms } => {
                let v: f64 = terms
                    .iter()
                    .map(|(c, alpha)| {
                        c * alpha
                            .iter()
                            .zip(xi)
                            .map(|(&p, x)| x.powi(p as i32))
                            .product::<f64>()
                    })
                    .sum();
                Complex64::new(v, 0.0)
            }
            Factor::Cos { freq, phase } => {
                let s: f64 = freq.iter().zip(xi).map(|(a, b)| a * b).sum();
                Complex64::new((s + phase).cos(), 0.0)
            }
            Factor::Phase { freq, phase } => {
                let s: f64 = freq.iter().zip(xi).map(|(a, b)| a * b).sum();
                Complex64::from_polar(1.0, s + phase)
            }
        }
    }
}

/// Closed-form record for the coefficient `c_k(ξ)` of `e^{ik·x}`:
/// `(re + i·im) · Π factors(ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormMode {
    pub k: Vec<i64>,
    pub re: f64,
    pub im: f64,
    #[serde(default)]
    pub factors: Vec<Factor>,
}

impl ClosedFormMode {
    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        self.factors
            .iter()
            .fold(Complex64::new(self.re, self.im), |acc, f| acc * f.eval(xi))
    }
}

/// Symbol `a(x, ξ) = Σ_k c_k(ξ) e^{ik·x}` with finitely many modes.
///
/// The Fourier coefficient in the orthonormal convention is
/// `â_k(ξ) = (2π)^{d/2} c_k(ξ)`, see [`TorusSymbol::hat`].
#[derive(Clone)]
pub struct TorusSymbol {
    dim: usize,
    modes: Vec<Vec<i64>>,
    funcs: Vec<ModeFn>,
    records: Option<Vec<ClosedFormMode>>,
}

impl fmt::Debug for TorusSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusSymbol")
            .field("dim", &self.dim)
            .field("modes", &self.modes)
            .field("closed_form", &self.records.is_some())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct SymbolJson {
    dim: usize,
    modes: Vec<ClosedFormMode>,
}

impl Serialize for TorusSymbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.records {
            Some(r) => SymbolJson {
                dim: self.dim,
                modes: r.clone(),
            }
            .serialize(s),
            None => Err(serde::ser::Error::custom(
                "symbol built from closures has no closed-form record",
            )),
        }
    }
}

impl<'de> Deserialize<'de> for TorusSymbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SymbolJson::deserialize(d)?;
        TorusSymbol::from_records(j.dim, j.modes).map_err(serde::de::Error::custom)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > lattice_core::MAX_DIM {
        return Err(Error::ShapeError(format!("symbol dimension {dim} outside 1..=4")));
    }
    Ok(())
}

impl TorusSymbol {
    pub fn from_records(dim: usize, records: Vec<ClosedFormMode>) -> Result<Self> {
        check_dim(dim)?;
        let mut modes = Vec::with_capacity(records.len());
        let mut funcs: Vec<ModeFn> = Vec::with_capacity(records.len());
        for r in &records {
            if r.k.len() != dim {
                return Err(Error::ShapeError(format!("mode {:?} in dimension {dim}", r.k)));
            }
            for f in &r.factors {
                let n = match f {
                    Factor::Gaussian { center, width } => {
                        if !(*width > 0.0) {
                            return Err(Error::ShapeError("gaussian width must be positive".into()));
                        }
                        center.len()
                    }
                    Factor::Polynomial { terms } => terms.first().map_or(dim, |t| t.1.len()),
                    Factor::Cos { freq, .. } | Factor::Phase { freq, .. } => freq.len(),
                };
                if n != dim {
                    return Err(Error::ShapeError(format!("factor {f:?} in dimension {dim}")));
                }
            }
            modes.push(r.k.clone());
            let rc = r.clone();
            funcs.push(Arc::new(move |xi: &[f64]| rc.eval(xi)));
        }
        Ok(TorusSymbol {
            dim,
            modes,
            funcs,
            records: Some(records),
        })
    }

    pub fn from_fns(dim: usize, entries: Vec<(Vec<i64>, ModeFn)>) -> Result<Self> {
        check_dim(dim)?;
        let mut modes = Vec::with_capacity(entries.len());
        let mut funcs = Vec::with_capacity(entries.len());
        for (k, f) in entries {
            if k.len() != dim {
                return Err(Error::ShapeError(format!("mode {k:?} in dimension {dim}")));
            }
            modes.push(k);
            funcs.push(f);
        }
        Ok(TorusSymbol {
            dim,
            modes,
            funcs,
            records: None,
        })
    }

    /// `a(x, ξ) = f(ξ)`.
    pub fn xi_only(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Result<Self> {
        Self::from_fns(
            dim,
            vec![(vec![0; dim], Arc::new(move |xi: &[f64]| Complex64::new(f(xi), 0.0)))],
        )
    }

    /// ξ-independent trigonometric polynomial `Σ c_k e^{ik·x}`.
    pub fn trig(dim: usize, terms: &[(Vec<i64>, Complex64)]) -> Result<Self> {
        let rec = terms
            .iter()
            .map(|(k, c)| ClosedFormMode {
                k: k.clone(),
                re: c.re,
                im: c.im,
                factors: vec![],
            })
            .collect();
        Self::from_records(dim, rec)
    }

    /// `e^{im·x}`.
    pub fn plane(m: &[i64]) -> Result<Self> {
        Self::trig(m.len(), &[(m.to_vec(), Complex64::new(1.0, 0.0))])
    }

    /// `amp · cos(m·x)`, a real symbol.
    pub fn cos_mode(m: &[i64], amp: f64) -> Result<Self> {
        let neg: Vec<i64> = m.iter().map(|v| -v).collect();
        if m.iter().all(|&v| v == 0) {
            return Self::trig(m.len(), &[(m.to_vec(), Complex64::new(amp, 0.0))]);
        }
        Self::trig(
            m.len(),
            &[
                (m.to_vec(), Complex64::new(amp / 2.0, 0.0)),
                (neg, Complex64::new(amp / 2.0, 0.0)),
            ],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> &[Vec<i64>] {
        &self.modes
    }

    pub fn records(&self) -> Option<&[ClosedFormMode]> {
        self.records.as_deref()
    }

    /// `c_k(ξ)` for the `i`-th mode.
    #[inline]
    pub fn coeff(&self, i: usize, xi: &[f64]) -> Complex64 {
        (self.funcs[i])(xi)
    }

    /// `â_k(ξ) = (2π)^{d/2} c_k(ξ)` for the `i`-th mode.
    pub fn hat(&self, i: usize, xi: &[f64]) -> Complex64 {
        self.coeff(i, xi) * (2.0 * PI).powf(self.dim as f64 / 2.0)
    }

    /// The symbol with only the modes accepted by `keep`; closed-form records are kept.
    pub fn restrict_modes(&self, keep: impl Fn(&[i64]) -> bool) -> Self {
        let idx: Vec<usize> = (0..self.modes.len()).filter(|&i| keep(&self.modes[i])).collect();
        TorusSymbol {
            dim: self.dim,
            modes: idx.iter().map(|&i| self.modes[i].clone()).collect(),
            funcs: idx.iter().map(|&i| self.funcs[i].clone()).collect(),
            records: self
                .records
                .as_ref()
                .map(|r| idx.iter().map(|&i| r[i].clone()).collect()),
        }
    }

    /// Largest `‖k‖∞` over the modes.
    pub fn bandwidth(&self) -> usize {
        self.modes
            .iter()
            .map(|k| k.iter().map(|v| v.unsigned_abs() as usize).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        self.modes
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let s: f64 = k.iter().zip(x).map(|(a, b)| *a as f64 * b).sum();
                self.coeff(i, xi) * Complex64::from_polar(1.0, s)
            })
            .sum()
    }

    /// Multiplies every coefficient by a function of ξ.
    pub fn times_xi(&self, g: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> Self {
        let g: ModeFn = Arc::new(g);
        let funcs = self
            .funcs
            .iter()
            .map(|f| {
                let f = f.clone();
                let g = g.clone();
                Arc::new(move |xi: &[f64]| f(xi) * g(xi)) as ModeFn
            })
            .collect();
        TorusSymbol {
            dim: self.dim,
            modes: self.modes.clone(),
            funcs,
            records: None,
        }
    }

    /// Sum of two symbols; coinciding modes are merged.
    pub fn add(&self, other: &TorusSymbol) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::ShapeError("adding symbols of different dimension".into()));
        }
        let mut modes = self.modes.clone();
        let mut funcs = self.funcs.clone();
        for (k, g) in other.modes.iter().zip(&other.funcs) {
            match modes.iter().position(|m| m == k) {
                Some(i) => {
                    let f = funcs[i].clone();
                    let g = g.clone();
                    funcs[i] = Arc::new(move |xi: &[f64]| f(xi) + g(xi));
                }
                None => {
                    modes.push(k.clone());
                    funcs.push(g.clone());
                }
            }
        }
        let records = match (&self.records, &other.records) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        // merged closures replace duplicate records, keep the record list only when disjoint
        let records = records.filter(|r: &Vec<ClosedFormMode>| r.len() == modes.len());
        Ok(TorusSymbol {
            dim: self.dim,
            modes,
            funcs,
            records,
        })
    }

    /// `a ∘ φ_s` for the free flow `φ_s(x, ξ) = (x + s dH(ξ), ξ)`:
    /// the mode `k` picks up `e^{i s k·dH(ξ)}`.
    pub fn flow_pullback(&self, model: &HamiltonianModel, s: f64) -> Result<Self> {
        if model.dim() != Some(self.dim) && model.dim().is_some() {
            return Err(Error::ShapeError("model and symbol dimensions differ".into()));
        }
        let funcs = self
            .modes
            .iter()
            .zip(&self.funcs)
            .map(|(k, f)| {
                let f = f.clone();
                let k: Vec<f64> = k.iter().map(|&v| v as f64).collect();
                let m = model.clone();
                Arc::new(move |xi: &[f64]| {
                    let g = m.gradient(xi).unwrap_or_else(|_| vec![0.0; xi.len()]);
                    let p: f64 = k.iter().zip(&g).map(|(a, b)| a * b).sum();
                    f(xi) * Complex64::from_polar(1.0, s * p)
                }) as ModeFn
            })
            .collect();
        Ok(TorusSymbol {
            dim: self.dim,
            modes: self.modes.clone(),
            funcs,
            records: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_roundtrip() {
        let s = TorusSymbol::from_records(
            2,
            vec![ClosedFormMode {
                k: vec![1, -1],
                re: 0.5,
                im: 0.25,
                factors: vec![
                    Factor::Gaussian { center: vec![1.0, 0.0], width: 0.5 },
                    Factor::Polynomial { terms: vec![(2.0, vec![1, 0]), (1.0, vec![0, 2])] },
                ],
            }],
        )
        .unwrap();
        let j = serde_json::to_string(&s).unwrap();
        let back: TorusSymbol = serde_json::from_str(&j).unwrap();
        let xi = [0.7, -0.2];
        assert_eq!(back.coeff(0, &xi), s.coeff(0, &xi));
        let expect = Complex64::new(0.5, 0.25) * (-(0.09 + 0.04) / 0.5f64).exp() * (1.4 + 0.04);
        assert!((s.coeff(0, &xi) - expect).norm() < 1e-15);
    }

    #[test]
    fn cos_mode_is_real() {
        let s = TorusSymbol::cos_mode(&[2, 1], 3.0).unwrap();
        let v = s.eval(&[0.3, 1.1], &[0.0, 0.0]);
        assert!((v.re - 3.0 * (0.6f64 + 1.1).cos()).abs() < 1e-14);
        assert!(v.im.abs() < 1e-15);
    }
}
