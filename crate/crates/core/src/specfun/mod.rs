//! Gamma, Bessel `J_ν`/`Y_ν` at positive real argument and `I_ν` at complex
//! argument.

mod bessel;
mod gamma;
mod modified;
mod spherical;

pub use bessel::{
    asymptotic_switch, bessel_jy, bessel_jy_branch, bessel_jy_with_derivatives,
    bessel_y_reflection, branch_for, series_switch, Branch, ASYMPTOTIC_XMIN,
};
pub use gamma::{gamma, ln_gamma};
pub use modified::{mod_bessel_i, mod_bessel_i_integral};
pub use spherical::spherical_bessel_j_seq;

pub(crate) use bessel::bessel_j;
pub(crate) use gamma::{gamma_pos, ln_gamma_pos};

use crate::error::{Error, Result};

/// Non-negative Bessel order.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Order(f64);

impl Order {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::domain(format!("Bessel order must be finite and >= 0, got {nu}")));
        }
        Ok(Order(nu))
    }

    pub fn nu(self) -> f64 {
        self.0
    }
}

/// `J_ν(x)` and `Y_ν(x)` at the same order and argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselPair {
    pub j: f64,
    pub y: f64,
}
