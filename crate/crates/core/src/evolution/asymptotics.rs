//! Model oscillatory integrals with known large-`t` behaviour.

use super::cutoff::{smooth_cutoff, CutoffSpec};
use super::filon::{graded_breaks, two_sided_breaks, uniform_breaks, FilonRule};
use crate::error::{Error, Result};
use crate::Cplx;

/// Largest `t·λ` accepted; beyond it the phase `tλ` loses too many digits.
pub const PHASE_CAP: f64 = 1e12;

const FINEST: f64 = 1e-16;
const TRANSITION_PANELS: usize = 32;

fn check_phase(t: f64, lambda_top: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    if t * lambda_top > PHASE_CAP {
        return Err(Error::Budget(format!("t*lambda = {:.3e} exceeds the phase cap {PHASE_CAP:.0e}", t * lambda_top)));
    }
    Ok(())
}

/// Panels for an integrand carried by `[0, λ₁]` with an algebraic endpoint at 0.
fn cutoff_rule(spec: &CutoffSpec) -> Result<FilonRule> {
    let mut b = graded_breaks(FINEST * spec.lambda0(), spec.lambda0(), 0.5);
    b.extend(uniform_breaks(spec.lambda0(), spec.lambda1(), TRANSITION_PANELS));
    FilonRule::new(b)
}

/// `∫₀^∞ e^{−itλ} λ^a χ(λ) dλ`.
pub fn erdelyi_integral(a: f64, t: f64, spec: &CutoffSpec) -> Result<Cplx> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::domain(format!("a must lie in (0, 1], got {a}")));
    }
    check_phase(t, spec.lambda1())?;
    Ok(cutoff_rule(spec)?.integrate(t, |x| x.powf(a) * smooth_cutoff(x, spec)))
}

/// `Γ(1+a) (it)^{−1−a}`.
pub fn erdelyi_leading_term(a: f64, t: f64) -> Cplx {
    let it = Cplx::new(0.0, t);
    it.powf(-1.0 - a) * crate::specfun::gamma_pos(1.0 + a)
}

/// Test integrand for the Jensen–Kato lemmas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JensenKato {
    /// `F = (λ−1)₊^{5/2} (2−λ)₊^{7/2}`, vanishing near 0; `|∫| = o(t⁻²)`.
    A1,
    /// `F = λ^β χ(λ) / ln(e + 1/λ)`, so `F″ = o(λ^{β−2})`; `|∫| = o(t^{−1−β})`.
    A2(f64),
}

impl JensenKato {
    pub fn profile(self, lambda: f64) -> f64 {
        match self {
            Self::A1 => {
                if lambda <= 1.0 || lambda >= 2.0 {
                    0.0
                } else {
                    (lambda - 1.0).powf(2.5) * (2.0 - lambda).powf(3.5)
                }
            }
            Self::A2(beta) => {
                if lambda <= 0.0 {
                    0.0
                } else {
                    lambda.powf(beta) * smooth_cutoff(lambda, &CutoffSpec::default())
                        / (std::f64::consts::E + 1.0 / lambda).ln()
                }
            }
        }
    }

    /// Power of `t` the residual is scaled by.
    pub fn scaling(self) -> f64 {
        match self {
            Self::A1 => 2.0,
            Self::A2(beta) => 1.0 + beta,
        }
    }

    fn rule(self) -> Result<FilonRule> {
        match self {
            Self::A1 => FilonRule::new(two_sided_breaks(1.0, 2.0, 1e-10, 0.5, 16)),
            Self::A2(_) => cutoff_rule(&CutoffSpec::default()),
        }
    }
}

/// `|∫ e^{−itλ} F(λ) dλ| · t^{s}` for the built-in `F` of `kind`.
pub fn jensen_kato_residual(kind: JensenKato, t: f64) -> Result<f64> {
    jensen_kato_residual_with(kind, t, |x| kind.profile(x))
}

/// As [`jensen_kato_residual`] with a caller-supplied `F` on the same panels.
pub fn jensen_kato_residual_with<F: FnMut(f64) -> f64>(kind: JensenKato, t: f64, f: F) -> Result<f64> {
    if let JensenKato::A2(beta) = kind {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::domain(format!("beta must lie in (0, 1), got {beta}")));
        }
    }
    check_phase(t, 2.0)?;
    Ok(kind.rule()?.integrate(t, f).norm() * t.powf(kind.scaling()))
}
