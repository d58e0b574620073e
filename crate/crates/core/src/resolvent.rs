//! Free resolvent `R₀(α, λ)` on `λ > 0` (boundary value from the upper half
//! plane), its angular modes and the threshold kernels `G₀`, `G₁`, `G₂`.
//!
//! Mode kernels are taken against the radial measure `r′ dr′`; the plane
//! kernel is `(1/2π) Σ_m K_m(r, r′) e^{im(θ−θ′)}`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::field::{Flux, PolarPoint};
use crate::quadrature::tanh_sinh;
use crate::specfun::{bessel_j, bessel_jy, gamma_pos, ln_gamma_pos, Order};
use crate::Cplx;

/// Threshold kernel selector: `G₀`, `G₁` (∝ λ^{|α|}) or `G₂` (∝ λ^{1−|α|}).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKernelId {
    G0,
    G1,
    G2,
}

impl ThresholdKernelId {
    pub fn from_index(j: u8) -> Result<Self> {
        match j {
            0 => Ok(Self::G0),
            1 => Ok(Self::G1),
            2 => Ok(Self::G2),
            _ => Err(Error::domain(format!("threshold kernel index must be 0, 1 or 2, got {j}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Self::G0 => 0,
            Self::G1 => 1,
            Self::G2 => 2,
        }
    }
}

/// Largest number of modes per ladder summed by the plane kernels.
pub const MAX_MODES: usize = 200_000;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// `(πi/2) J_ν(√λ r_<) (J_ν(√λ r_>) + i Y_ν(√λ r_>))`, `ν = |m+α|`.
pub fn mode_resolvent_kernel(m: i64, flux: &Flux, lambda: f64, r: f64, rp: f64) -> Result<Cplx> {
    check_positive("lambda", lambda)?;
    check_positive("r", r)?;
    check_positive("r'", rp)?;
    let nu = flux.mode_order(m);
    let k = lambda.sqrt();
    let (lo, hi) = if r < rp { (r, rp) } else { (rp, r) };
    if let Some(d) = series_difference(nu, k * lo, k * hi) {
        return Ok(d.total(nu, lo / hi));
    }
    let j_lo = bessel_jy(Order::new(nu)?, k * lo)?.j;
    let hi_pair = bessel_jy(Order::new(nu)?, k * hi)?;
    Ok(Cplx::new(0.0, 0.5 * PI) * j_lo * Cplx::new(hi_pair.j, hi_pair.y))
}

/// Per-mode threshold kernels: `G₀,m = (r_</r_>)^ν/(2ν)` in every mode,
/// `G₁` only in mode 0 and `G₂` only in mode `−sign α`.
pub fn mode_threshold_kernel(id: ThresholdKernelId, m: i64, flux: &Flux, r: f64, rp: f64) -> Result<Cplx> {
    if !(r >= 0.0) || !(rp >= 0.0) {
        return Err(Error::domain("radii must be non-negative"));
    }
    let nu = flux.mode_order(m);
    match id {
        ThresholdKernelId::G0 => {
            let (lo, hi) = if r < rp { (r, rp) } else { (rp, r) };
            if hi == 0.0 {
                return Err(Error::Diagonal);
            }
            Ok(Cplx::new((lo / hi).powf(nu) / (2.0 * nu), 0.0))
        }
        ThresholdKernelId::G1 | ThresholdKernelId::G2 => {
            let wanted = if id == ThresholdKernelId::G1 { 0 } else { flux.partner_mode() };
            if m != wanted {
                return Ok(Cplx::new(0.0, 0.0));
            }
            let g = gamma_pos(1.0 + nu);
            let cot = (PI * nu).cos() / (PI * nu).sin();
            Ok(Cplx::new(-cot, 1.0) * (0.5 * PI * (r * rp / 4.0).powf(nu) / (g * g)))
        }
    }
}

/// Per-mode kernels of the leading spectral density: `j = 1` gives
/// `(rr′/4)^{|α|}/(2Γ(1+|α|))` in mode 0, `j = 2` gives
/// `Γ(1+|α|)(rr′/4)^{1−|α|}/(2Γ²(2−|α|))` in mode `−sign α`.
pub fn mode_leading_density_kernel(j: u8, m: i64, flux: &Flux, r: f64, rp: f64) -> Result<f64> {
    let a = flux.abs_alpha();
    match j {
        1 if m == 0 => Ok((r * rp / 4.0).powf(a) / (2.0 * gamma_pos(1.0 + a))),
        2 if m == flux.partner_mode() => {
            let nu = 1.0 - a;
            let g = gamma_pos(1.0 + nu);
            Ok(gamma_pos(1.0 + a) * (r * rp / 4.0).powf(nu) / (2.0 * g * g))
        }
        1 | 2 => Ok(0.0),
        _ => Err(Error::domain(format!("leading density kernel index must be 1 or 2, got {j}"))),
    }
}

/// Series pieces of `R₀,m − G₀,m` for small arguments:
/// `ρ^ν (S_a S_b − 1)/(2ν) + (π/2)(i − cot πν) P (1 + e2)` with
/// `P = (ab/4)^ν/Γ(ν+1)²`.
#[derive(Debug, Clone, Copy)]
struct SeriesDifference {
    e1: f64,
    e2: f64,
    p: f64,
    cot: f64,
}

impl SeriesDifference {
    /// `R₀,m − G₀,m`.
    fn difference(&self, nu: f64, rho: f64) -> Cplx {
        self.part(nu, rho, 1.0)
    }

    /// `R₀,m − G₀,m` minus its `P`-proportional leading term (the threshold
    /// `G₁`/`G₂` contribution of this mode).
    fn beyond_threshold(&self, nu: f64, rho: f64) -> Cplx {
        self.part(nu, rho, 0.0)
    }

    fn part(&self, nu: f64, rho: f64, keep_lead: f64) -> Cplx {
        let geometric = rho.powf(nu) * self.e1 / (2.0 * nu);
        let bessel = Cplx::new(-self.cot, 1.0) * (0.5 * PI * self.p * (keep_lead + self.e2));
        bessel + geometric
    }

    fn total(&self, nu: f64, rho: f64) -> Cplx {
        self.difference(nu, rho) + rho.powf(nu) / (2.0 * nu)
    }
}

/// `Σ_{j≥1} (−q)^j / (j! (ν+1)_j)`, i.e. the normalised `J_ν` series minus 1.
fn series_plus(q: f64, nu: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for j in 1..400 {
        let jf = j as f64;
        term *= -q / (jf * (nu + jf));
        sum += term;
        if term.abs() <= 1e-17 * (1.0 + sum.abs()) {
            break;
        }
    }
    sum
}

/// `Σ_{j≥1} q^j / (j! Π_{i=1}^{j} (ν − i))`, the normalised `J_{−ν}` series
/// minus 1.
fn series_minus(q: f64, nu: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for j in 1..400 {
        let jf = j as f64;
        term *= q / (jf * (nu - jf));
        sum += term;
        if jf > nu && term.abs() <= 1e-17 * (1.0 + sum.abs()) {
            break;
        }
    }
    sum
}

fn series_difference(nu: f64, a: f64, b: f64) -> Option<SeriesDifference> {
    let stable = b <= 2.0 || (nu >= 20.0 && nu >= 3.0 * b * b);
    if !stable {
        return None;
    }
    let qa = 0.25 * a * a;
    let qb = 0.25 * b * b;
    let ga = series_plus(qa, nu);
    let gb = series_minus(qb, nu);
    let gbj = series_plus(qb, nu);
    let e1 = ga + gb + ga * gb;
    let e2 = ga + gbj + ga * gbj;
    let p = if a == 0.0 {
        0.0
    } else {
        (nu * (0.25 * a * b).ln() - 2.0 * ln_gamma_pos(nu + 1.0)).exp()
    };
    let cot = (PI * nu).cos() / (PI * nu).sin();
    Some(SeriesDifference { e1, e2, p, cot })
}

/// `R₀,m − G₀,m` at wavenumber `k = √λ`.
fn mode_difference(nu: f64, k: f64, lo: f64, hi: f64) -> Result<Cplx> {
    let rho = lo / hi;
    if let Some(d) = series_difference(nu, k * lo, k * hi) {
        return Ok(d.difference(nu, rho));
    }
    let j_lo = bessel_j(nu, k * lo);
    let hi_pair = bessel_jy(Order::new(nu)?, k * hi)?;
    let r0 = Cplx::new(0.0, 0.5 * PI) * j_lo * Cplx::new(hi_pair.j, hi_pair.y);
    Ok(r0 - rho.powf(nu) / (2.0 * nu))
}

/// The two ladders of modes ordered by `ν`: `ν = k + |α|` at `m = k·sign α`
/// and `ν = k − |α|` at `m = −k·sign α`.
fn ladder_modes(flux: &Flux, k: usize) -> (i64, Option<i64>) {
    let s = flux.sign() as i64;
    let k = k as i64;
    (s * k, if k >= 1 { Some(-s * k) } else { None })
}

fn check_off_diagonal(x: &PolarPoint, y: &PolarPoint) -> Result<()> {
    if x.distance(y) < 1e-8 * (1.0 + x.r()) {
        return Err(Error::Diagonal);
    }
    Ok(())
}

/// Lerch transcendent `Φ(z, 1, c) = Σ_{j≥0} z^j/(j+c)` for `|z| <= 1`,
/// `z ≠ 1`, `c > 0`.
fn lerch_phi1(z: Cplx, c: f64, tol: f64) -> Result<Cplx> {
    let az = z.norm();
    if az <= 0.99 {
        let mut sum = Cplx::new(0.0, 0.0);
        let mut zp = Cplx::new(1.0, 0.0);
        for j in 0..100_000 {
            let denom = j as f64 + c;
            sum += zp / denom;
            zp *= z;
            let tail = az.powi(j + 1) / ((denom + 1.0) * (1.0 - az));
            if tail <= tol * sum.norm() {
                return Ok(sum);
            }
        }
        return Err(Error::Convergence("Lerch series did not converge".into()));
    }
    // ∫₀¹ u^{c−1}/(1 − z u) du, with 1 − zu = (1 − z) + z(1 − u)
    let one_minus_z = Cplx::new(1.0, 0.0) - z;
    let est = tanh_sinh(0.0, 1.0, tol.max(1e-15), 14, |_, dl, dr| {
        Cplx::new(dl.powf(c - 1.0), 0.0) / (one_minus_z + z * dr)
    });
    if !(est.error <= 1e3 * tol.max(1e-15) * est.value.norm()) {
        return Err(Error::Convergence(format!(
            "Lerch integral error {:e} at z = {z}",
            est.error
        )));
    }
    Ok(est.value)
}

/// Plane kernel `G₀(x, y) = (1/4π) Σ_m e^{im(θ−θ′)} ρ^{|m+α|}/|m+α|`.
fn g0_plane(flux: &Flux, x: &PolarPoint, y: &PolarPoint, tol: f64) -> Result<Cplx> {
    check_off_diagonal(x, y)?;
    let (lo, hi) = if x.r() < y.r() { (x.r(), y.r()) } else { (y.r(), x.r()) };
    if lo == 0.0 {
        return Ok(Cplx::new(0.0, 0.0));
    }
    let rho = lo / hi;
    let a = flux.abs_alpha();
    let s = flux.sign();
    let dtheta = x.theta() - y.theta();
    let za = Cplx::from_polar(rho, s * dtheta);
    let zb = Cplx::from_polar(rho, -s * dtheta);
    let ladder_a = lerch_phi1(za, a, tol)? * rho.powf(a);
    let ladder_b = lerch_phi1(zb, 1.0 - a, tol)? * zb * rho.powf(-a);
    Ok((ladder_a + ladder_b) / (4.0 * PI))
}

/// `(1/π) artanh √ρ`, the value of `G₀` at `|α| = 1/2`, `θ = θ′`.
pub fn g0_half_flux_closed_form(ratio: f64) -> f64 {
    ratio.sqrt().atanh() / PI
}

/// Plane threshold kernels.
pub fn threshold_kernel(id: ThresholdKernelId, flux: &Flux, x: &PolarPoint, y: &PolarPoint) -> Result<Cplx> {
    match id {
        ThresholdKernelId::G0 => g0_plane(flux, x, y, 1e-14),
        ThresholdKernelId::G1 => Ok(mode_threshold_kernel(id, 0, flux, x.r(), y.r())? / TAU),
        ThresholdKernelId::G2 => {
            let m = flux.partner_mode();
            let phase = Cplx::from_polar(1.0, m as f64 * (x.theta() - y.theta()));
            Ok(mode_threshold_kernel(id, m, flux, x.r(), y.r())? * phase / TAU)
        }
    }
}

/// Plane kernels `𝒢₁`, `𝒢₂` of the leading spectral density.
pub fn leading_density_kernel(j: u8, flux: &Flux, x: &PolarPoint, y: &PolarPoint) -> Result<Cplx> {
    let m = if j == 2 { flux.partner_mode() } else { 0 };
    let v = mode_leading_density_kernel(j, m, flux, x.r(), y.r())?;
    Ok(Cplx::from_polar(v / TAU, m as f64 * (x.theta() - y.theta())))
}

/// Sum `(1/2π) Σ_m f(m, ν) e^{im(θ−θ′)}` over both ladders, certifying the
/// tail with `|f| <= K ρ^ν/ν²` (valid once `ν >= nu_min`).
fn certified_mode_sum<F>(
    flux: &Flux,
    dtheta: f64,
    rho: f64,
    bound_k: f64,
    nu_min: f64,
    scale_floor: f64,
    tol: f64,
    mut f: F,
) -> Result<Cplx>
where
    F: FnMut(i64, f64) -> Result<Cplx>,
{
    let mut sum = Cplx::new(0.0, 0.0);
    for k in 0..MAX_MODES {
        let (ma, mb) = ladder_modes(flux, k);
        sum += f(ma, flux.mode_order(ma))? * Cplx::from_polar(1.0, ma as f64 * dtheta);
        if let Some(mb) = mb {
            sum += f(mb, flux.mode_order(mb))? * Cplx::from_polar(1.0, mb as f64 * dtheta);
        }
        // smallest order not yet summed
        let nu0 = k as f64 + 1.0 - flux.abs_alpha();
        if nu0 >= nu_min && nu0 > 2.0 {
            let geometric = if rho < 1.0 {
                rho.powf(nu0) / ((1.0 - rho) * nu0 * nu0)
            } else {
                f64::INFINITY
            };
            let tail = 2.0 * bound_k * geometric.min(1.0 / (nu0 - 1.0));
            if tail <= tol * (sum.norm() / TAU).max(scale_floor) * TAU {
                return Ok(sum / TAU);
            }
        }
    }
    Err(Error::Convergence(format!(
        "mode sum not certified within {MAX_MODES} modes (ρ = {rho})"
    )))
}

/// Plane free resolvent `R₀(α, λ, x, y)`, summed as `G₀` plus mode-wise
/// corrections `R₀,m − G₀,m`.
pub fn free_resolvent_kernel(flux: &Flux, lambda: f64, x: &PolarPoint, y: &PolarPoint, tol: f64) -> Result<Cplx> {
    check_positive("lambda", lambda)?;
    check_positive("tol", tol)?;
    check_off_diagonal(x, y)?;
    let (lo, hi) = if x.r() < y.r() { (x.r(), y.r()) } else { (y.r(), x.r()) };
    if lo == 0.0 {
        return Err(Error::domain("free resolvent kernel needs r, r' > 0"));
    }
    let g0 = g0_plane(flux, x, y, 0.1 * tol)?;
    let k = lambda.sqrt();
    let (a, b) = (k * lo, k * hi);
    let bound_k = 0.25 * (a * a + b * b) + 1.0;
    let nu_min = 0.5 * b * b + 2.0;
    let floor = g0.norm();
    let dtheta = x.theta() - y.theta();
    let corr = certified_mode_sum(flux, dtheta, lo / hi, bound_k, nu_min, floor, tol, |_, nu| {
        mode_difference(nu, k, lo, hi)
    })?;
    Ok(g0 + corr)
}

/// `R₀(α,λ,x,y) − G₀ − G₁ λ^{|α|} − G₂ λ^{1−|α|}` for `0 < λ < 1`, summed
/// mode by mode so no cancellation against the threshold terms occurs.
pub fn low_energy_remainder(flux: &Flux, lambda: f64, x: &PolarPoint, y: &PolarPoint) -> Result<Cplx> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::domain(format!("low-energy remainder needs 0 < λ < 1, got {lambda}")));
    }
    check_off_diagonal(x, y)?;
    let (lo, hi) = if x.r() < y.r() { (x.r(), y.r()) } else { (y.r(), x.r()) };
    if lo == 0.0 {
        return Err(Error::domain("low-energy remainder needs r, r' > 0"));
    }
    let k = lambda.sqrt();
    let (a, b) = (k * lo, k * hi);
    let rho = lo / hi;
    let partner = flux.partner_mode();
    let dtheta = x.theta() - y.theta();
    // scale of the leading threshold term, used as the absolute floor
    let floor = lambda * (lo * hi).max(1e-300);
    certified_mode_sum(flux, dtheta, rho, 0.25 * (a * a + b * b) + 1e-300, 0.5 * b * b + 2.0, floor, 1e-12, |m, nu| {
        let threshold = m == 0 || m == partner;
        match series_difference(nu, a, b) {
            Some(d) if threshold => Ok(d.beyond_threshold(nu, rho)),
            Some(d) => Ok(d.difference(nu, rho)),
            None => {
                let mut v = mode_difference(nu, k, lo, hi)?;
                if m == 0 {
                    v -= mode_threshold_kernel(ThresholdKernelId::G1, m, flux, lo, hi)? * lambda.powf(nu);
                }
                if m == partner {
                    v -= mode_threshold_kernel(ThresholdKernelId::G2, m, flux, lo, hi)? * lambda.powf(nu);
                }
                Ok(v)
            }
        }
    })
}
