//! Exact integer arithmetic for primitive submodules of `Z^d` (d ≤ 4):
//! Hermite normal forms, saturation, annihilators of gradients, resonance
//! classification, complements and fundamental domains.

pub mod complement;
pub mod error;
pub mod hnf;
pub mod rational;
pub mod resonance;
pub mod submodule;

pub use complement::{complement_data, ComplementData};
pub use error::{Error, Result};
pub use hnf::IntVector;
pub use rational::{ratio, RationalVector};
pub use resonance::{detect_relations, resonance_classify, Gradient, ResonanceMode};
pub use submodule::{
    annihilator_lattice, fractional_reduce, saturate, saturate_in, FundamentalDomainSpec,
    SubmoduleBasis, MAX_DIM,
};

/// Small-integer vector helper.
pub fn ivec(v: &[i64]) -> IntVector {
    v.iter().map(|&x| num_bigint::BigInt::from(x)).collect()
}
