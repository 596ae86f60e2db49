//! Truncated Fourier states on the torus, Weyl quantization, propagation and pairings.

pub mod average;
pub mod density;
pub mod fft;
pub mod grid;
pub mod propagate;
pub mod state;
pub mod symbol;
pub mod weyl;

pub use average::{time_averaged_pairing, time_averaged_pairings, trapezoid_weights, TimeWindow};
pub use density::{line_autocorrelation, position_density, sampled_density, slab_mass, DensityGrid};
pub use grid::FourierGrid;
pub use propagate::{
    energies, for_each_sample, free_propagate, free_propagate_with, perturbed_propagate,
    PotentialOperator, PotentialSpec, SplitStepper,
};
pub use state::FourierState;
pub use symbol::{ClosedFormMode, Factor, ModeFn, TorusSymbol};
pub use weyl::{banded_sum, weyl_apply, weyl_apply_on, weyl_form, wigner_pairing, wigner_pairing_complex};
