//! Flux reduction, polar geometry, weights, angular mode projection and
//! radial potential tables.

mod flux;
mod geometry;
mod potential;
mod projection;
mod weight;

pub use flux::{reduce_flux, Flux, SigmaAlpha};
pub use geometry::{vector_potential, PolarPoint};
pub use potential::{PotentialSpec, Profile};
pub use projection::{project_mode, reconstruct};
pub use weight::{weight, weight_r, WeightKind};
