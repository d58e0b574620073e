use std::f64::consts::PI;

use super::gamma::{gamma_real, ln_gamma_pos, temme_gammas};
use super::{BesselPair, Order};
use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const TEMME_XMAX: f64 = 2.0;
const CF_MAXIT: usize = 100_000;

/// Smallest argument at which the large-argument expansion may be used.
pub const ASYMPTOTIC_XMIN: f64 = 30.0;

/// Which evaluation branch handles `(ν, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Ascending power series for `J`; `Y` still from the continued fractions.
    Series,
    /// Steed's continued fractions with Temme's series for small `x`.
    ContinuedFraction,
    /// Hankel large-argument expansion.
    Asymptotic,
}

/// Switch radius between the power series and the continued-fraction branch.
pub fn series_switch(nu: f64) -> f64 {
    (8.0 * (nu + 1.0)).sqrt()
}

/// Switch radius between the continued-fraction branch and the Hankel expansion.
pub fn asymptotic_switch(nu: f64) -> f64 {
    ASYMPTOTIC_XMIN.max(1.5 * (nu + 1.0) * (nu + 1.0))
}

pub fn branch_for(nu: f64, x: f64) -> Branch {
    if x >= asymptotic_switch(nu) {
        Branch::Asymptotic
    } else if x <= series_switch(nu) {
        Branch::Series
    } else {
        Branch::ContinuedFraction
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("Bessel argument must be positive and finite, got {x}")));
    }
    Ok(())
}

/// `J_ν(x)` and `Y_ν(x)` for `x > 0`.
pub fn bessel_jy(order: Order, x: f64) -> Result<BesselPair> {
    check_x(x)?;
    let (j, y, _, _) = jy_full(order.nu(), x);
    Ok(BesselPair { j, y })
}

/// Values and first derivatives `(J_ν, Y_ν)`, `(J_ν′, Y_ν′)`.
pub fn bessel_jy_with_derivatives(order: Order, x: f64) -> Result<(BesselPair, BesselPair)> {
    check_x(x)?;
    let (j, y, jp, yp) = jy_full(order.nu(), x);
    Ok((BesselPair { j, y }, BesselPair { j: jp, y: yp }))
}

/// `Y_ν(x) = (J_ν(x) cos νπ − J_{−ν}(x)) / sin νπ` with both `J` from the
/// ascending series. Only meaningful for non-integer ν and moderate `x`.
pub fn bessel_y_reflection(order: Order, x: f64) -> Result<f64> {
    check_x(x)?;
    let nu = order.nu();
    let s = (nu * PI).sin();
    if s.abs() < 1e-8 {
        return Err(Error::domain(format!("reflection formula needs non-integer order, got {nu}")));
    }
    let jp = series_j_general(nu, x);
    let jm = series_j_general(-nu, x);
    Ok((jp * (nu * PI).cos() - jm) / s)
}

/// `J_ν(x)` alone, skipping `Y` where that is cheaper.
pub(crate) fn bessel_j(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    match branch_for(nu, x) {
        Branch::Series => series_j(nu, x),
        Branch::Asymptotic => hankel_asymptotic(nu, x).0,
        Branch::ContinuedFraction => steed_temme(nu, x).0,
    }
}

/// `(J, Y, J′, Y′)` at order `nu >= 0`, `x > 0`.
pub(crate) fn jy_full(nu: f64, x: f64) -> (f64, f64, f64, f64) {
    match branch_for(nu, x) {
        Branch::Series => {
            let (_, y, _, yp) = steed_temme(nu, x);
            let j = series_j(nu, x);
            let jp = nu / x * j - series_j(nu + 1.0, x);
            (j, y, jp, yp)
        }
        Branch::ContinuedFraction => steed_temme(nu, x),
        Branch::Asymptotic => {
            let (j, y) = hankel_asymptotic(nu, x);
            let (j1, y1) = hankel_asymptotic(nu + 1.0, x);
            (j, y, nu / x * j - j1, nu / x * y - y1)
        }
    }
}

/// Evaluate a fixed branch regardless of the switch radii (used for
/// crossover checks).
pub fn bessel_jy_branch(order: Order, x: f64, branch: Branch) -> Result<BesselPair> {
    check_x(x)?;
    let nu = order.nu();
    let (j, y) = match branch {
        Branch::Series => (series_j(nu, x), steed_temme(nu, x).1),
        Branch::ContinuedFraction => {
            let r = steed_temme(nu, x);
            (r.0, r.1)
        }
        Branch::Asymptotic => hankel_asymptotic(nu, x),
    };
    Ok(BesselPair { j, y })
}

fn series_j(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let lead = if nu < 100.0 {
        let p = half.powf(nu) / gamma_real(nu + 1.0);
        if p.is_finite() && p != 0.0 {
            p
        } else {
            (nu * half.ln() - ln_gamma_pos(nu + 1.0)).exp()
        }
    } else {
        (nu * half.ln() - ln_gamma_pos(nu + 1.0)).exp()
    };
    if lead == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        let k = k as f64;
        term *= q / (k * (nu + k));
        sum += term;
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Ascending series allowing negative non-integer order.
fn series_j_general(nu: f64, x: f64) -> f64 {
    if nu >= 0.0 {
        return series_j(nu, x);
    }
    let half = 0.5 * x;
    let q = -half * half;
    let mut coeff = 1.0 / gamma_real(nu + 1.0);
    let mut sum = coeff;
    for k in 1..500 {
        let kf = k as f64;
        coeff *= q / (kf * (nu + kf));
        sum += coeff;
        if coeff.abs() < EPS * sum.abs() && kf > -nu {
            break;
        }
    }
    half.powf(nu) * sum
}

/// Hankel large-argument expansion, returns `(J_ν(x), Y_ν(x))`.
fn hankel_asymptotic(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200usize {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eight_x);
        let mag = term.abs();
        if mag > prev {
            break;
        }
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            // k = 1, 3, 5, ... contributes +, -, +, ... to Q
            let s = if ((k - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            q += s * term;
        } else {
            p += sign * term;
        }
        if mag < 1e-17 * (p.abs() + q.abs()) {
            break;
        }
        prev = mag;
    }
    let phase = (0.5 * nu + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cchi = cx * cp + sx * sp;
    let schi = sx * cp - cx * sp;
    let amp = (2.0 / (PI * x)).sqrt();
    (amp * (p * cchi - q * schi), amp * (p * schi + q * cchi))
}

/// Steed's method (continued fractions CF1/CF2) with Temme's series for
/// `x < 2`. Returns `(J, Y, J′, Y′)`.
fn steed_temme(nu: f64, x: f64) -> (f64, f64, f64, f64) {
    let nl = if x < TEMME_XMAX {
        (nu + 0.5) as usize
    } else {
        (nu - x + 1.5).max(0.0) as usize
    };
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: f = J'_ν / J_ν
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..CF_MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() <= EPS {
            break;
        }
    }

    // downward recurrence to order xmu
    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let mut rjl1 = rjl;
    let mut rjp1 = rjpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
        if rjl.abs() > 1e250 {
            rjl *= 1e-250;
            rjpl *= 1e-250;
            rjl1 *= 1e-250;
            rjp1 *= 1e-250;
        }
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < TEMME_XMAX {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let dd = -x2.ln();
        let e = xmu * dd;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * dd);
        let ee = e.exp();
        let mut p = ee / (gampl * PI);
        let mut q = 1.0 / (ee * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS { 1.0 } else { pimu2.sin() / pimu2 };
        let r = PI * pimu2 * fact3 * fact3;
        let mut cc = 1.0;
        let dq = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        for i in 1..CF_MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            cc *= dq / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = cc * (ff + r * q);
            sum += del;
            let del1 = cc * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                break;
            }
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fct = a * xi / (p * p + q * q);
        let mut cr = br + q * fct;
        let mut ci = bi + p * fct;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        for i in 1..CF_MAXIT {
            a += 2.0 * i as f64;
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fct = a / (cr * cr + ci * ci);
            cr = br + cr * fct;
            ci = bi - ci * fct;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() <= EPS {
                break;
            }
        }
        let gam = (p - f) / q;
        let mag = (w / ((p - f) * gam + q)).sqrt();
        rjmu = mag.copysign(rjl);
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }

    let scale = rjmu / rjl;
    let j = rjl1 * scale;
    let jp = rjp1 * scale;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    let y = rymu;
    let yp = nu * xi * rymu - ry1;
    (j, y, jp, yp)
}
