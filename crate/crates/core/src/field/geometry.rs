use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::field::Flux;

/// A point of the plane in polar form, `r >= 0`, `θ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    r: f64,
    theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() || !theta.is_finite() {
            return Err(Error::domain(format!("invalid polar point ({r}, {theta})")));
        }
        let mut t = theta.rem_euclid(TAU);
        if t >= TAU {
            t = 0.0;
        }
        Ok(Self { r, theta: t })
    }

    pub fn from_cartesian(x: f64, y: f64) -> Result<Self> {
        Self::new(x.hypot(y), y.atan2(x))
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_cartesian(&self) -> [f64; 2] {
        let (s, c) = self.theta.sin_cos();
        [self.r * c, self.r * s]
    }

    pub fn distance(&self, other: &PolarPoint) -> f64 {
        let [a, b] = self.to_cartesian();
        let [c, d] = other.to_cartesian();
        (a - c).hypot(b - d)
    }

    /// The point with radius scaled by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.r * s, self.theta)
    }
}

/// `A(x) = α (−x₂, x₁) / |x|²`.
pub fn vector_potential(x: [f64; 2], flux: &Flux) -> Result<[f64; 2]> {
    let n2 = x[0] * x[0] + x[1] * x[1];
    if !(n2 > 0.0) {
        return Err(Error::domain("vector potential is singular at the origin"));
    }
    let a = flux.alpha() / n2;
    Ok([-a * x[1], a * x[0]])
}
