//! The free Aharonov–Bohm propagator `e^{−itH_α}(x, y)`.
//!
//! Per mode, against the radial measure `r′ dr′`,
//! `K_m = (1/(2it)) I_ν(rr′/(2it)) e^{−(r²+r′²)/(4it)}` with `ν = |m+α|`.
//! On this ray `I_ν(−iy) = e^{−iπν/2} J_ν(y)`, so only real-argument `J_ν`
//! is evaluated.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::field::{Flux, PolarPoint};
use crate::specfun::{bessel_j, gamma_pos, ln_gamma_pos};
use crate::Cplx;

/// Largest `|m|` the plane kernel will sum before giving up.
pub const MAX_M: usize = 500;

/// A plane kernel value with its truncation record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Cplx,
    /// Largest `|m|` summed.
    pub truncation_m: i64,
    /// Bound on the modulus of the discarded modes.
    pub tail_bound: f64,
}

fn check_args(t: f64, r: f64, rp: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("time must be positive and finite, got {t}")));
    }
    if !(r >= 0.0) || !(rp >= 0.0) || !r.is_finite() || !rp.is_finite() {
        return Err(Error::domain(format!("radii must be finite and non-negative, got {r}, {rp}")));
    }
    Ok(())
}

/// `(1/(2it)) e^{i(r²+r′²)/(4t)}`.
fn mode_prefactor(t: f64, r: f64, rp: f64) -> Cplx {
    Cplx::from_polar(1.0 / (2.0 * t), (r * r + rp * rp) / (4.0 * t) - FRAC_PI_2)
}

/// Mode kernel `K_m(t; r, r′)`.
pub fn mode_propagator_kernel(m: i64, flux: &Flux, t: f64, r: f64, rp: f64) -> Result<Cplx> {
    check_args(t, r, rp)?;
    let nu = flux.mode_order(m);
    let x = r * rp / (2.0 * t);
    let rotated = Cplx::from_polar(bessel_j(nu, x), -FRAC_PI_2 * nu);
    Ok(mode_prefactor(t, r, rp) * rotated)
}

/// `|J_ν(x)| <= (x/2)^ν / Γ(ν+1)`, summed over `ν, ν+1, …`.
fn ladder_tail(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half / (nu + 1.0);
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let first = if half == 0.0 { 0.0 } else { (nu * half.ln() - ln_gamma_pos(nu + 1.0)).exp() };
    first / (1.0 - q)
}

/// Plane kernel `(1/2π) Σ_m K_m e^{im(θ−θ′)}`, summed over a symmetric window
/// of modes grown until the bound on the remaining modes falls below
/// `tol · max(|sum|, 1e-8 Σ|terms|)`.
pub fn propagator_kernel(flux: &Flux, t: f64, x: &PolarPoint, y: &PolarPoint, tol: f64) -> Result<KernelValue> {
    check_args(t, x.r(), y.r())?;
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let (r, rp) = (x.r(), y.r());
    if r == 0.0 || rp == 0.0 {
        return Ok(KernelValue { value: Cplx::new(0.0, 0.0), truncation_m: 0, tail_bound: 0.0 });
    }
    let arg = r * rp / (2.0 * t);
    let dtheta = x.theta() - y.theta();
    let a = flux.abs_alpha();
    let s = flux.sign() as i64;
    let mut sum = Cplx::new(0.0, 0.0);
    let mut mass = 0.0;
    let term = |m: i64| {
        let nu = flux.mode_order(m);
        let j = bessel_j(nu, arg);
        (Cplx::from_polar(j, m as f64 * dtheta - FRAC_PI_2 * nu), j.abs())
    };
    let scale = mode_prefactor(t, r, rp) / (2.0 * PI);
    for k in 0..=MAX_M as i64 {
        // ladder ν = k + |α| at m = k·sign α, and ν = k − |α| at m = −k·sign α
        let (v, w) = term(s * k);
        sum += v;
        mass += w;
        if k >= 1 {
            let (v, w) = term(-s * k);
            sum += v;
            mass += w;
        }
        let tail = ladder_tail(k as f64 + 1.0 + a, arg) + ladder_tail(k as f64 + 1.0 - a, arg);
        if tail <= tol * sum.norm().max(1e-8 * mass) {
            return Ok(KernelValue {
                value: sum * scale,
                truncation_m: k,
                tail_bound: tail * scale.norm(),
            });
        }
    }
    Err(Error::Convergence(format!(
        "propagator mode sum not certified within |m| <= {MAX_M} (rr'/2t = {arg})"
    )))
}

/// Large-time leading term: `(it)^{−1−|α|} (rr′/4)^{|α|} / (4πΓ(1+|α|))` for
/// `|α| < 1/2`, with the extra factor `1 + e^{−i(θ−θ′)}` at `α = 1/2`.
pub fn propagator_leading_term(flux: &Flux, t: f64, x: &PolarPoint, y: &PolarPoint) -> Result<Cplx> {
    check_args(t, x.r(), y.r())?;
    let a = flux.abs_alpha();
    let s = 1.0 + a;
    // principal branch: (it)^{−s} = t^{−s} e^{−iπs/2}
    let power = Cplx::from_polar(t.powf(-s), -FRAC_PI_2 * s);
    let c = (x.r() * y.r() / 4.0).powf(a) / (4.0 * PI * gamma_pos(1.0 + a));
    let mut value = power * c;
    if flux.is_half() {
        let m = flux.partner_mode() as f64;
        value *= Cplx::new(1.0, 0.0) + Cplx::from_polar(1.0, m * (x.theta() - y.theta()));
    }
    Ok(value)
}

/// `min{t^{−1}, (rr′)^{|α|} t^{−1−|α|}}`.
pub fn pointwise_bound_envelope(flux: &Flux, t: f64, x: &PolarPoint, y: &PolarPoint) -> Result<f64> {
    check_args(t, x.r(), y.r())?;
    let a = flux.abs_alpha();
    Ok((1.0 / t).min((x.r() * y.r()).powf(a) * t.powf(-1.0 - a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::reduce_flux;

    #[test]
    fn half_order_mode_closed_form() {
        let f = reduce_flux(0.5).unwrap();
        let t = 2.0;
        let got = mode_propagator_kernel(0, &f, t, 1.0, 1.0).unwrap();
        let z = Cplx::new(0.0, -0.25);
        let i_half = (Cplx::new(2.0 / PI, 0.0) / z).sqrt() * z.sinh();
        let want = i_half * (-Cplx::new(2.0, 0.0) / Cplx::new(0.0, 4.0 * t)).exp() / Cplx::new(0.0, 2.0 * t);
        assert!((got - want).norm() < 1e-14 * want.norm(), "{got} {want}");
    }

    #[test]
    fn origin_gives_zero() {
        let f = reduce_flux(0.25).unwrap();
        assert_eq!(mode_propagator_kernel(3, &f, 1.0, 0.0, 2.0).unwrap(), Cplx::new(0.0, 0.0));
        let o = PolarPoint::new(0.0, 0.0).unwrap();
        let y = PolarPoint::new(1.0, 0.3).unwrap();
        assert_eq!(propagator_kernel(&f, 1.0, &o, &y, 1e-12).unwrap().value, Cplx::new(0.0, 0.0));
    }

    #[test]
    fn leading_term_examples() {
        let f = reduce_flux(0.25).unwrap();
        let x = PolarPoint::new(2.0, 0.0).unwrap();
        let v = propagator_leading_term(&f, 1.0, &x, &x).unwrap();
        let mag = 1.0 / (4.0 * PI * gamma_pos(1.25));
        assert!((v.norm() - mag).abs() < 1e-15);
        assert!((v.norm() - 0.087_795).abs() < 1e-6);
        let h = reduce_flux(0.5).unwrap();
        let y = PolarPoint::new(2.0, PI).unwrap();
        assert!(propagator_leading_term(&h, 1.0, &x, &y).unwrap().norm() < 1e-16);
    }

    #[test]
    fn envelope_continuity() {
        let f = reduce_flux(0.3).unwrap();
        let x = PolarPoint::new(2.0, 0.0).unwrap();
        let y = PolarPoint::new(2.5, 1.0).unwrap();
        let e = pointwise_bound_envelope(&f, 5.0, &x, &y).unwrap();
        assert!((e - 0.2).abs() < 1e-15);
        let o = PolarPoint::new(0.0, 0.0).unwrap();
        assert_eq!(pointwise_bound_envelope(&f, 5.0, &o, &y).unwrap(), 0.0);
    }
}
