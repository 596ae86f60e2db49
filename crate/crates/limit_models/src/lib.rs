//! Limit objects for resonant frequencies: averaged symbols, uniform orbit measures,
//! the Schrödinger and Heisenberg flows on Bloch windows, initial density operators
//! extracted from `K_h` fibers, and classical flows on two-microlocal symbols.

pub mod averaged;
pub mod bloch;
pub mod extract;
pub mod flows;

pub use averaged::{averaged_symbol, orbit_measure_pairing, orbit_measure_pairing_complex, OrbitMeasureSpec};
pub use bloch::{
    bloch_propagate, check_admissible, heisenberg_trace_pairing, heisenberg_trace_pairing_complex, BlochDensityOperator,
    BlochEvolution, BlochSpace, ADMISSIBILITY_TOL, DEFAULT_WINDOW_RADIUS,
};
pub use extract::{dominant_atom, extract_atoms, fiber_atom, BlochAtom, DOMINANT_FRACTION};
pub use flows::{flow_pullback, two_micro_flow_pullback, Flow};
