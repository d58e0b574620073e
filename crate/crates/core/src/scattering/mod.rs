//! Per-mode Nyström discretisation on radial grids, the zero-resonance
//! check, the spectral density `E(α, λ)` and the threshold operators.
//!
//! A radial potential never couples angular modes, so every operator is a
//! list of per-mode matrices.

mod grid;
mod operator;
mod solve;

pub use grid::{build_radial_grid, RadialGrid, PANEL_NODES};
pub use operator::{discretize_mode_kernel, ModeOperator, Weighting};
pub use solve::{
    check_zero_resonance, check_zero_resonance_with, critical_coupling, distorted_wave, g0_mode_matrix,
    leading_operator, log_grid, manufacture_critical_potential, perturbed_resolvent, positive_energy_margin,
    r0_mode_matrix, spectral_density, threshold_operators, MarginReport, ResonanceReport, ThresholdOperators,
    RESONANCE_THRESHOLD,
};

pub(crate) use operator::{spectral_norm, weight_factors};
pub(crate) use solve::{distorted_wave_with, potential_values};
