//! Initial data on the torus: wave packets, special eigenfunctions and quasimodes,
//! eigenfunction clusters, and the h-oscillation diagnostic.

pub mod cluster;
pub mod coherent;
pub mod profile;
pub mod recipe;
pub mod special;

pub use cluster::{eigenfunction_cluster, level_set, oscillation_tails, OscillationRow, LEVEL_TOL};
pub use coherent::{coherent_grid, coherent_state, modulated_coherent_state, Built};
pub use profile::{ProfileSpec, TAIL_TOL};
pub use recipe::{oscillation_profile, PowerLaw, StateRecipe};
pub use special::{
    centered_angle, example3, lagrangian_diag, periodic_coefficients, plateau, power_quasimode,
    smooth_step, wunsch, wunsch_potential, wunsch_transverse,
    wunsch_transverse_potential, wunsch_well, POTENTIAL_TOL,
};
