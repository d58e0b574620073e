use std::f64::consts::PI;

use super::bessel::bessel_j;
use super::gamma::{gamma_pos, ln_gamma_pos};
use super::Order;
use crate::error::{Error, Result};
use crate::quadrature::tanh_sinh;
use crate::Cplx;

const MAX_ABS_Z: f64 = 1e6;

/// Modified Bessel function `I_ν(z)` on the principal branch.
///
/// On the imaginary axis the value comes from `J_ν` through
/// `I_ν(±iy) = e^{±iπν/2} J_ν(y)`; elsewhere the ascending series, the
/// large-argument expansion or the integral representation is used.
pub fn mod_bessel_i(order: Order, z: Cplx) -> Result<Cplx> {
    let nu = order.nu();
    if !z.re.is_finite() || !z.im.is_finite() || z.norm() > MAX_ABS_Z {
        return Err(Error::domain(format!("I_ν argument out of range: {z}")));
    }
    if z.norm() == 0.0 {
        return Ok(Cplx::new(if nu == 0.0 { 1.0 } else { 0.0 }, 0.0));
    }
    if z.re < 0.0 {
        let phase = if z.im >= 0.0 { PI * nu } else { -PI * nu };
        return Ok(Cplx::from_polar(1.0, phase) * right_half(nu, -z)?);
    }
    right_half(nu, z)
}

/// `I_ν(iy)` for real `y` of either sign.
pub(crate) fn i_imag_axis(nu: f64, y: f64) -> Cplx {
    if y == 0.0 {
        return Cplx::new(if nu == 0.0 { 1.0 } else { 0.0 }, 0.0);
    }
    let phase = 0.5 * PI * nu * y.signum();
    Cplx::from_polar(bessel_j(nu, y.abs()), phase)
}

fn right_half(nu: f64, z: Cplx) -> Result<Cplx> {
    let r = z.norm();
    let value = if z.re == 0.0 {
        i_imag_axis(nu, z.im)
    } else if r <= 2.0 || (r - z.re <= 10.0 && r <= 40.0 + nu) {
        series(nu, z)
    } else if r >= 30f64.max(1.5 * (nu + 1.0) * (nu + 1.0)) {
        asymptotic(nu, z)
    } else {
        integral(nu, z)?
    };
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Overflow(format!("I_{nu}({z}) exceeds the floating range")));
    }
    Ok(value)
}

fn series(nu: f64, z: Cplx) -> Cplx {
    let half = z * 0.5;
    let lead = if nu == 0.0 {
        Cplx::new(1.0, 0.0)
    } else {
        (half.ln() * nu - ln_gamma_pos(nu + 1.0)).exp()
    };
    let q = half * half;
    let mut term = Cplx::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..2000 {
        let k = k as f64;
        term *= q / (k * (nu + k));
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    lead * sum
}

fn asymptotic(nu: f64, z: Cplx) -> Cplx {
    let mu = 4.0 * nu * nu;
    let mut a = Cplx::new(1.0, 0.0);
    let mut s_alt = a;
    let mut s_plain = a;
    let mut prev = f64::INFINITY;
    for k in 1..200usize {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0) / z;
        let mag = a.norm();
        if mag > prev {
            break;
        }
        if k % 2 == 0 {
            s_alt += a;
        } else {
            s_alt -= a;
        }
        s_plain += a;
        if mag < 1e-17 {
            break;
        }
        prev = mag;
    }
    let root = (z * (2.0 * PI)).sqrt();
    let sign = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let reflected = Cplx::new(0.0, sign) * Cplx::from_polar(1.0, sign * PI * nu) * (-z).exp();
    (z.exp() * s_alt + reflected * s_plain) / root
}

fn integral(nu: f64, z: Cplx) -> Result<Cplx> {
    let est = tanh_sinh(-1.0, 1.0, 1e-13, 16, |s, dl, dr| {
        (z * s).exp() * (dl * dr).powf(nu - 0.5)
    });
    if !(est.error <= 1e-10 * est.value.norm()) {
        return Err(Error::Convergence(format!(
            "integral representation of I_{nu}({z}) did not converge (error {:e})",
            est.error
        )));
    }
    let pref = (z * 0.5).powf(nu) / (PI.sqrt() * gamma_pos(nu + 0.5));
    Ok(pref * est.value)
}

/// `I_ν(z)` from the integral representation
/// `(z/2)^ν / (Γ(ν+½)Γ(½)) ∫_{-1}^{1} (1-s²)^{ν-½} e^{zs} ds`.
/// Slow; intended for cross-checks and for arguments no other branch covers.
pub fn mod_bessel_i_integral(order: Order, z: Cplx) -> Result<Cplx> {
    if z.norm() == 0.0 {
        return Ok(Cplx::new(if order.nu() == 0.0 { 1.0 } else { 0.0 }, 0.0));
    }
    integral(order.nu(), z)
}
