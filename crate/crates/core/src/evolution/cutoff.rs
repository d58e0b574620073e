use crate::error::{Error, Result};

/// Low-energy cutoff `χ`: `1` on `[0, λ₀]`, `0` on `[λ₁, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    lambda0: f64,
    lambda1: f64,
}

impl CutoffSpec {
    pub fn new(lambda0: f64, lambda1: f64) -> Result<Self> {
        if !(lambda0 > 0.0) || !(lambda1 > lambda0) || !lambda1.is_finite() {
            return Err(Error::domain(format!("cutoff needs 0 < lambda0 < lambda1, got {lambda0}, {lambda1}")));
        }
        Ok(Self { lambda0, lambda1 })
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    /// The same transition with every energy multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.lambda0 * s, self.lambda1 * s)
    }
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self { lambda0: 0.5, lambda1: 2.0 }
    }
}

fn g(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// `χ(λ)`, built from `e^{−1/x}` so that every derivative vanishes at both
/// ends of the transition.
pub fn smooth_cutoff(lambda: f64, spec: &CutoffSpec) -> f64 {
    if lambda <= spec.lambda0 {
        return 1.0;
    }
    if lambda >= spec.lambda1 {
        return 0.0;
    }
    let s = (lambda - spec.lambda0) / (spec.lambda1 - spec.lambda0);
    let a = g(1.0 - s);
    a / (a + g(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_support_and_symmetry() {
        let c = CutoffSpec::default();
        assert_eq!(smooth_cutoff(0.25, &c), 1.0);
        assert_eq!(smooth_cutoff(4.0, &c), 0.0);
        assert!((smooth_cutoff(1.25, &c) - 0.5).abs() < 1e-15);
        assert!(CutoffSpec::new(1.0, 1.0).is_err());
        assert!(CutoffSpec::new(0.0, 1.0).is_err());
    }
}
