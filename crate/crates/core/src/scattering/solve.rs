use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::grid::RadialGrid;
use super::operator::{
    complex_vector, real_to_complex, scale_both, smallest_singular_value, sqrt_weights, weight_factors, ModeOperator,
    Weighting,
};
use crate::error::{Error, Result};
use crate::field::{Flux, PotentialSpec};
use crate::resolvent::{mode_leading_density_kernel, mode_resolvent_kernel, mode_threshold_kernel, ThresholdKernelId};
use crate::specfun::{bessel_jy, gamma_pos, Order};
use crate::{CMatrix, Cplx};

/// Default pass threshold for the smallest singular value of `1 + G₀V`.
pub const RESONANCE_THRESHOLD: f64 = 1e-6;

fn check_support(v: &PotentialSpec, grid: &RadialGrid) -> Result<()> {
    if !v.is_zero() && v.support_radius() > grid.r_max() {
        return Err(Error::Grid(format!(
            "potential support {} exceeds R_max = {}",
            v.support_radius(),
            grid.r_max()
        )));
    }
    Ok(())
}

pub(crate) fn potential_values(grid: &RadialGrid, v: &PotentialSpec) -> Vec<f64> {
    grid.nodes().iter().map(|&r| v.value(r)).collect()
}

/// Plain Nyström matrix of `G₀` in mode `m` (real).
pub fn g0_mode_matrix(flux: &Flux, m: i64, grid: &RadialGrid) -> DMatrix<f64> {
    let nu = flux.mode_order(m);
    let r = grid.nodes();
    let sw = sqrt_weights(grid);
    DMatrix::from_fn(r.len(), r.len(), |i, j| {
        let (lo, hi) = if r[i] < r[j] { (r[i], r[j]) } else { (r[j], r[i]) };
        sw[i] * sw[j] * (lo / hi).powf(nu) / (2.0 * nu)
    })
}

/// Plain Nyström matrix of `R₀(λ)` in mode `m`, assembled from the
/// factorisation `(πi/2) J_ν(kr_<) (J_ν + iY_ν)(kr_>)`.
pub fn r0_mode_matrix(flux: &Flux, m: i64, lambda: f64, grid: &RadialGrid) -> Result<CMatrix> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
    }
    let nu = flux.mode_order(m);
    let order = Order::new(nu)?;
    let k = lambda.sqrt();
    let r = grid.nodes();
    let sw = sqrt_weights(grid);
    let pairs: Vec<_> = r.iter().map(|&x| bessel_jy(order, k * x)).collect::<Result<_>>()?;
    let n = r.len();
    let mut a = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut v = Cplx::new(0.0, 0.5 * PI) * pairs[i].j * Cplx::new(pairs[j].j, pairs[j].y);
            if !v.re.is_finite() || !v.im.is_finite() {
                v = mode_resolvent_kernel(m, flux, lambda, r[i], r[j])?;
            }
            let e = v * (sw[i] * sw[j]);
            a[(i, j)] = e;
            a[(j, i)] = e;
        }
    }
    Ok(a)
}

/// Smallest singular value of `1 + G₀V` per mode, in `B(ρ⁻¹, ρ⁻¹)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceReport {
    pub modes: Vec<(i64, f64)>,
    pub margin: f64,
    pub worst_mode: i64,
    pub threshold: f64,
    pub pass: bool,
}

pub fn check_zero_resonance(flux: &Flux, v: &PotentialSpec, grid: &RadialGrid) -> Result<ResonanceReport> {
    check_zero_resonance_with(flux, v, grid, RESONANCE_THRESHOLD)
}

pub fn check_zero_resonance_with(
    flux: &Flux,
    v: &PotentialSpec,
    grid: &RadialGrid,
    threshold: f64,
) -> Result<ResonanceReport> {
    check_support(v, grid)?;
    let vals = potential_values(grid, v);
    let h = weight_factors(grid, Weighting::RhoInvHalf);
    let modes: Vec<i64> = grid.modes().collect();
    let margins: Vec<(i64, f64)> = modes
        .par_iter()
        .map(|&m| {
            let g = g0_mode_matrix(flux, m, grid);
            let n = g.nrows();
            // ρ^{−1/2}(1 + G₀V)ρ^{1/2}
            let mat = DMatrix::from_fn(n, n, |i, j| {
                let d = if i == j { 1.0 } else { 0.0 };
                d + h[i] * g[(i, j)] * vals[j] / h[j]
            });
            (m, smallest_singular_value(&real_to_complex(&mat)))
        })
        .collect();
    let (worst_mode, margin) = margins
        .iter()
        .copied()
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    Ok(ResonanceReport { modes: margins, margin, worst_mode, threshold, pass: margin > threshold })
}

/// The factor `s > 0` for which `1 + G₀(sV)` is singular in mode `m`, i.e.
/// `−1/μ` for the most negative real eigenvalue `μ` of `G₀V`.
pub fn critical_coupling(flux: &Flux, v: &PotentialSpec, grid: &RadialGrid, m: i64) -> Result<f64> {
    check_support(v, grid)?;
    let vals = potential_values(grid, v);
    let g = g0_mode_matrix(flux, m, grid);
    let n = g.nrows();
    let gv = DMatrix::from_fn(n, n, |i, j| g[(i, j)] * vals[j]);
    let mu = gv
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-10 * z.norm().max(1e-300) && z.re < 0.0)
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    if !mu.is_finite() {
        return Err(Error::Data(format!("G0 V has no negative eigenvalue in mode {m}")));
    }
    Ok(-1.0 / mu)
}

/// `V` rescaled so that `1 + G₀V` is singular in mode `m` on this grid.
pub fn manufacture_critical_potential(
    flux: &Flux,
    v: &PotentialSpec,
    grid: &RadialGrid,
    m: i64,
) -> Result<PotentialSpec> {
    v.scaled(critical_coupling(flux, v, grid, m)?)
}

/// Plain matrix of `R(λ) = (1 + R₀(λ)V)⁻¹ R₀(λ)` in mode `m`.
pub fn perturbed_resolvent(flux: &Flux, m: i64, lambda: f64, v: &PotentialSpec, grid: &RadialGrid) -> Result<CMatrix> {
    check_support(v, grid)?;
    let r0 = r0_mode_matrix(flux, m, lambda, grid)?;
    let vals = potential_values(grid, v);
    let n = r0.nrows();
    let a = CMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { Cplx::new(1.0, 0.0) } else { Cplx::new(0.0, 0.0) };
        d + r0[(i, j)] * vals[j]
    });
    a.lu()
        .solve(&r0)
        .ok_or_else(|| Error::Singular(format!("1 + R0 V singular at lambda = {lambda}, mode {m}")))
}

/// Plain distorted wave `ψ = (1 + R₀(λ)V)⁻¹ u` with `u_i = √w_i J_ν(√λ r_i)`.
///
/// `Im R₀` is rank one per mode, so `E(λ) = (1/π) Im R = ½ ψψᴴ`. Only the
/// nodes inside the support of `V` enter the linear solve.
pub fn distorted_wave(
    flux: &Flux,
    m: i64,
    lambda: f64,
    v: &PotentialSpec,
    grid: &RadialGrid,
) -> Result<DVector<Cplx>> {
    let vals = potential_values(grid, v);
    distorted_wave_with(flux, m, lambda, &vals, grid)
}

pub(crate) fn distorted_wave_with(
    flux: &Flux,
    m: i64,
    lambda: f64,
    vals: &[f64],
    grid: &RadialGrid,
) -> Result<DVector<Cplx>> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
    }
    let nu = flux.mode_order(m);
    let order = Order::new(nu)?;
    let k = lambda.sqrt();
    let r = grid.nodes();
    let sw = sqrt_weights(grid);
    let support: Vec<usize> = (0..r.len()).filter(|&i| vals[i] != 0.0).collect();
    if support.is_empty() {
        let u: Vec<f64> = r.iter().zip(&sw).map(|(&x, &s)| s * crate::specfun::bessel_j(nu, k * x)).collect();
        return Ok(complex_vector(&u));
    }
    let pairs: Vec<_> = r.iter().map(|&x| bessel_jy(order, k * x)).collect::<Result<_>>()?;
    let u = DVector::from_iterator(r.len(), pairs.iter().zip(&sw).map(|(p, &s)| Cplx::new(s * p.j, 0.0)));
    // R̂₀ restricted to (all rows) × (support columns)
    let r0 = |i: usize, j: usize| -> Result<Cplx> {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        let mut v = Cplx::new(0.0, 0.5 * PI) * pairs[a].j * Cplx::new(pairs[b].j, pairs[b].y);
        if !v.re.is_finite() || !v.im.is_finite() {
            v = mode_resolvent_kernel(m, flux, lambda, r[a], r[b])?;
        }
        Ok(v * (sw[i] * sw[j]))
    };
    let s = support.len();
    let mut cols = CMatrix::zeros(r.len(), s);
    for (c, &j) in support.iter().enumerate() {
        for i in 0..r.len() {
            cols[(i, c)] = r0(i, j)? * vals[j];
        }
    }
    let block = CMatrix::from_fn(s, s, |a, b| {
        let d = if a == b { Cplx::new(1.0, 0.0) } else { Cplx::new(0.0, 0.0) };
        d + cols[(support[a], b)]
    });
    let us = DVector::from_iterator(s, support.iter().map(|&i| u[i]));
    let psi_s = block
        .lu()
        .solve(&us)
        .ok_or_else(|| Error::Singular(format!("1 + R0 V singular at lambda = {lambda}, mode {m}")))?;
    Ok(&u - cols * psi_s)
}

/// `E(α, λ) = (1/π) Im R(λ)` per mode, weighted by `ρ^{−1/2}` on both sides.
pub fn spectral_density(flux: &Flux, lambda: f64, v: &PotentialSpec, grid: &RadialGrid) -> Result<Vec<ModeOperator>> {
    check_support(v, grid)?;
    let vals = potential_values(grid, v);
    let h = weight_factors(grid, Weighting::RhoInvHalf);
    let modes: Vec<i64> = grid.modes().collect();
    modes
        .par_iter()
        .map(|&m| {
            let psi = distorted_wave_with(flux, m, lambda, &vals, grid)?;
            let phi = DVector::from_iterator(psi.len(), psi.iter().zip(&h).map(|(z, &w)| z * w));
            let matrix = &phi * phi.adjoint() * Cplx::new(0.5, 0.0);
            Ok(ModeOperator { m, weighting: Weighting::RhoInvHalf, matrix })
        })
        .collect()
}

/// Threshold operators `T₀`, `T₁` and the leading density `E₁`, per mode and
/// weighted by `ρ^{−1/2}` on both sides.
#[derive(Debug, Clone)]
pub struct ThresholdOperators {
    pub t0: Vec<ModeOperator>,
    pub t1: Vec<ModeOperator>,
    pub e1: Vec<ModeOperator>,
}

fn leading_density_matrix(flux: &Flux, m: i64, grid: &RadialGrid) -> Result<CMatrix> {
    let mut g = CMatrix::zeros(grid.len(), grid.len());
    let r = grid.nodes();
    let sw = sqrt_weights(grid);
    let mut add = |j: u8| -> Result<()> {
        for a in 0..r.len() {
            for b in 0..r.len() {
                g[(a, b)] += Cplx::new(mode_leading_density_kernel(j, m, flux, r[a], r[b])? * sw[a] * sw[b], 0.0);
            }
        }
        Ok(())
    };
    if m == 0 {
        add(1)?;
    }
    if flux.is_half() && m == flux.partner_mode() {
        add(2)?;
    }
    Ok(g)
}

fn threshold_mixed_matrix(flux: &Flux, m: i64, grid: &RadialGrid) -> Result<CMatrix> {
    let sigma = f64::from(flux.sigma().value);
    let r = grid.nodes();
    let sw = sqrt_weights(grid);
    let n = r.len();
    let mut g = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let g1 = mode_threshold_kernel(ThresholdKernelId::G1, m, flux, r[a], r[b])?;
            let g2 = mode_threshold_kernel(ThresholdKernelId::G2, m, flux, r[a], r[b])?;
            g[(a, b)] = (g1 + g2 * sigma) * (sw[a] * sw[b]);
        }
    }
    Ok(g)
}

/// `(1 + G₀V)⁻¹` in mode `m`, plain.
fn inverse_one_plus_g0v(flux: &Flux, m: i64, vals: &[f64], grid: &RadialGrid) -> Result<DMatrix<f64>> {
    let g = g0_mode_matrix(flux, m, grid);
    let n = g.nrows();
    let b = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + g[(i, j)] * vals[j]);
    b.try_inverse()
        .ok_or_else(|| Error::Resonance { margin: 0.0, mode: m })
}

pub fn threshold_operators(flux: &Flux, v: &PotentialSpec, grid: &RadialGrid) -> Result<ThresholdOperators> {
    check_support(v, grid)?;
    let vals = potential_values(grid, v);
    let h = weight_factors(grid, Weighting::RhoInvHalf);
    let inv_gamma = 1.0 / gamma_pos(1.0 + flux.abs_alpha());
    let modes: Vec<i64> = grid.modes().collect();
    let per_mode: Vec<(ModeOperator, ModeOperator, ModeOperator)> = modes
        .par_iter()
        .map(|&m| {
            let binv = real_to_complex(&inverse_one_plus_g0v(flux, m, &vals, grid)?);
            // (1 + VG₀)⁻¹ = [(1 + G₀V)⁻¹]ᵀ in the symmetric Nyström form
            let binv_t = binv.transpose();
            let g0 = real_to_complex(&g0_mode_matrix(flux, m, grid));
            let t0 = &binv * g0;
            let t1 = &binv * threshold_mixed_matrix(flux, m, grid)? * &binv_t;
            let e1 = &binv * leading_density_matrix(flux, m, grid)? * &binv_t * Cplx::new(inv_gamma, 0.0);
            let wrap = |a: CMatrix| ModeOperator { m, weighting: Weighting::RhoInvHalf, matrix: scale_both(&a, &h) };
            Ok((wrap(t0), wrap(t1), wrap(e1)))
        })
        .collect::<Result<_>>()?;
    let mut out = ThresholdOperators { t0: Vec::new(), t1: Vec::new(), e1: Vec::new() };
    for (a, b, c) in per_mode {
        out.t0.push(a);
        out.t1.push(b);
        out.e1.push(c);
    }
    Ok(out)
}

/// `Γ(1+|α|) E₁`, the limit of `(it)^{1+|α|} ρ^{−1/2} e^{−itH} P_c ρ^{−1/2}`.
pub fn leading_operator(flux: &Flux, v: &PotentialSpec, grid: &RadialGrid) -> Result<Vec<ModeOperator>> {
    let g = gamma_pos(1.0 + flux.abs_alpha());
    Ok(threshold_operators(flux, v, grid)?
        .e1
        .into_iter()
        .map(|mut op| {
            op.matrix *= Cplx::new(g, 0.0);
            op
        })
        .collect())
}

/// Smallest singular value of `1 + VR₀(λ)` in `B(ρ, ρ)` over sampled `λ`
/// and all modes of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginReport {
    pub margin: f64,
    pub lambda_at_min: f64,
    pub mode_at_min: i64,
    /// `(λ, min over modes)` per sample.
    pub samples: Vec<(f64, f64)>,
}

pub fn positive_energy_margin(
    flux: &Flux,
    v: &PotentialSpec,
    grid: &RadialGrid,
    lambdas: &[f64],
) -> Result<MarginReport> {
    check_support(v, grid)?;
    if lambdas.is_empty() {
        return Err(Error::domain("no energies to sample"));
    }
    let vals = potential_values(grid, v);
    let h = weight_factors(grid, Weighting::RhoInvHalf);
    let modes: Vec<i64> = grid.modes().collect();
    let samples: Vec<(f64, f64, i64)> = lambdas
        .par_iter()
        .map(|&lambda| {
            let mut best = (f64::INFINITY, 0);
            for &m in &modes {
                let s = if v.is_zero() {
                    1.0
                } else {
                    let r0 = r0_mode_matrix(flux, m, lambda, grid)?;
                    let n = r0.nrows();
                    // ρ^{1/2}(1 + VR₀)ρ^{−1/2}
                    let mat = CMatrix::from_fn(n, n, |i, j| {
                        let d = if i == j { Cplx::new(1.0, 0.0) } else { Cplx::new(0.0, 0.0) };
                        d + r0[(i, j)] * (vals[i] / h[i] * h[j])
                    });
                    smallest_singular_value(&mat)
                };
                if s < best.0 {
                    best = (s, m);
                }
            }
            Ok((lambda, best.0, best.1))
        })
        .collect::<Result<_>>()?;
    let worst = samples
        .iter()
        .copied()
        .fold((f64::NAN, f64::INFINITY, 0), |acc, x| if x.1 < acc.1 { x } else { acc });
    Ok(MarginReport {
        margin: worst.1,
        lambda_at_min: worst.0,
        mode_at_min: worst.2,
        samples: samples.iter().map(|&(l, s, _)| (l, s)).collect(),
    })
}

/// Log-spaced samples from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() || per_decade == 0 {
        return Err(Error::domain(format!("bad log grid {lo}:{hi}:{per_decade}")));
    }
    let decades = (hi / lo).log10();
    let steps = (decades * per_decade as f64).round().max(0.0) as usize;
    if steps == 0 {
        return Ok(vec![lo]);
    }
    Ok((0..=steps).map(|k| lo * (hi / lo).powf(k as f64 / steps as f64)).collect())
}
