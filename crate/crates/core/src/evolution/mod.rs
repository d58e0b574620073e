//! Oscillatory λ-integration of the spectral density, the Erdélyi and
//! Jensen–Kato model integrals, and power-law fits of decay rates.

mod asymptotics;
mod cutoff;
mod filon;
mod fit;
mod pipeline;

pub use asymptotics::{
    erdelyi_integral, erdelyi_leading_term, jensen_kato_residual, jensen_kato_residual_with, JensenKato, PHASE_CAP,
};
pub use cutoff::{smooth_cutoff, CutoffSpec};
pub use filon::{graded_breaks, two_sided_breaks, uniform_breaks, FilonRule, FILON_NODES};
pub use fit::{fit_decay_exponent, time_ladder, DecayFit, MIN_DECADES, MIN_SAMPLES};
pub use pipeline::{evolve_weighted, EvolutionConfig, EvolutionSample, Evolver};
