use crate::error::{Error, Result};
use crate::field::PolarPoint;

/// Radial weight functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// `(1 + r²)^{s/2}`
    Poly(f64),
    /// `e^{r⁴/2}`
    RhoHalf,
    /// `e^{−r⁴/2}`
    RhoInvHalf,
}

const EXP_MAX: f64 = 709.0;

pub fn weight(kind: WeightKind, x: PolarPoint) -> Result<f64> {
    weight_r(kind, x.r())
}

pub fn weight_r(kind: WeightKind, r: f64) -> Result<f64> {
    match kind {
        WeightKind::Poly(s) => {
            let v = (1.0 + r * r).powf(0.5 * s);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Overflow(format!("(1+r²)^(s/2) at r={r}, s={s}")))
            }
        }
        WeightKind::RhoHalf => {
            let e = 0.5 * r.powi(4);
            if e > EXP_MAX {
                Err(Error::Overflow(format!("e^(r⁴/2) at r={r}")))
            } else {
                Ok(e.exp())
            }
        }
        WeightKind::RhoInvHalf => Ok((-0.5 * r.powi(4)).exp()),
    }
}
