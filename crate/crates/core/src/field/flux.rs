use crate::error::{Error, Result};

const INTEGER_TOL: f64 = 1e-12;

/// Gauge-reduced flux `α ∈ (-1/2, 1/2] \ {0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flux {
    alpha: f64,
    raw: f64,
}

/// `σ_α`: 1 at the boundary flux `|α| = 1/2`, 0 otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SigmaAlpha {
    pub value: u8,
}

/// Reduce a raw flux modulo 1 into `(-1/2, 1/2]`.
pub fn reduce_flux(raw: f64) -> Result<Flux> {
    if !raw.is_finite() {
        return Err(Error::domain(format!("flux must be finite, got {raw}")));
    }
    let mut alpha = raw - raw.round();
    if alpha.abs() <= INTEGER_TOL {
        return Err(Error::IntegerFlux(raw));
    }
    if (alpha.abs() - 0.5).abs() <= INTEGER_TOL {
        alpha = 0.5;
    }
    Ok(Flux { alpha, raw })
}

impl Flux {
    pub fn new(raw: f64) -> Result<Self> {
        reduce_flux(raw)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn raw(&self) -> f64 {
        self.raw
    }

    /// `sign α` as ±1.
    pub fn sign(&self) -> f64 {
        if self.alpha > 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `|α|`, the leading decay exponent minus one.
    pub fn abs_alpha(&self) -> f64 {
        self.alpha.abs()
    }

    /// `|α − sign α| = 1 − |α|`.
    pub fn next_exponent(&self) -> f64 {
        1.0 - self.alpha.abs()
    }

    /// Bessel order `|m + α|` of angular mode `m`.
    pub fn mode_order(&self, m: i64) -> f64 {
        (m as f64 + self.alpha).abs()
    }

    /// The mode whose order is `1 − |α|`, namely `m = −sign α`.
    pub fn partner_mode(&self) -> i64 {
        -(self.sign() as i64)
    }

    pub fn is_half(&self) -> bool {
        self.alpha == 0.5
    }

    pub fn sigma(&self) -> SigmaAlpha {
        SigmaAlpha { value: u8::from(self.is_half()) }
    }

    /// The same flux with opposite sign, reduced again.
    pub fn negated(&self) -> Result<Flux> {
        reduce_flux(-self.alpha)
    }
}
