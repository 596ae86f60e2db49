pub mod counterexamples;
pub mod diagnostics;
pub mod drift;
pub mod limit;
pub mod observability;
pub mod orbit;
pub mod spacing;
pub mod threshold;

pub use counterexamples::counterexamples;
pub use diagnostics::kh_diagnostics;
pub use drift::dirac_drift;
pub use limit::limit_compare;
pub use observability::observability;
pub use orbit::orbit_convergence;
pub use spacing::spacing;
pub use threshold::threshold_sweep;
