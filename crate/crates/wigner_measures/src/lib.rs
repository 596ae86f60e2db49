//! Two-microlocal analysis on the torus: the splitting `ξ = σ(ξ) + η(ξ)` near a resonant
//! point, symbols in the extra variable `η`, the cutoff decomposition of Wigner pairings,
//! the fiberwise transform `K_h` and the ρ-pairing with Bloch observables.

pub mod chart;
pub mod kh;
pub mod rho;
pub mod twomicro;
pub mod window;

pub use chart::ChartF;
pub use kh::{kh_transform, KhField, KhFiber};
pub use rho::{rho_pairing, rho_pairing_field, BlochObservable, IdentityObservable, ModeProjector, SymbolObservable};
pub use twomicro::{
    full_pairing, substituted_symbol, two_micro_pairing, CoreFn, CutoffPart, Scales, TwoMicroEntry,
    TwoMicroSymbol,
};
pub use window::{chi, smootherstep, MWindow};
