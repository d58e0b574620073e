//! `ρ^{−1/2} e^{−itH} P_c ρ^{−1/2} = ∫₀^∞ e^{−itλ} E(λ) dλ` per angular mode.
//!
//! Every `E_m(λ)` is rank one, `½ φφᴴ` with `φ = ρ^{−1/2}ψ` the weighted
//! distorted wave, so the λ-samples are stored once as the columns of `Φ`
//! and each time `t` only changes the quadrature weights:
//! `U_m(t) = ½ Φ diag(c(t)) Φᴴ`. `Φ` is compressed to its numerical range
//! first, which makes a new `t` cost `O(ℓ² N)` for rank `ℓ`.

use nalgebra::{DVector, SymmetricEigen};
use rayon::prelude::*;

use super::cutoff::{smooth_cutoff, CutoffSpec};
use super::filon::{graded_breaks, uniform_breaks, FilonRule};
use crate::error::{Error, Result};
use crate::field::{Flux, PotentialSpec};
use crate::scattering::{
    check_zero_resonance, distorted_wave_with, potential_values, spectral_norm, weight_factors, ModeOperator,
    RadialGrid, Weighting,
};
use crate::{CMatrix, Cplx};

/// Numerical parameters of the λ-integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub cutoff: CutoffSpec,
    /// Upper end `Λ` of the sampled spectrum; beyond it boundary terms are used.
    pub lambda_max: f64,
    /// Lower end of the geometric grading towards the threshold.
    pub lambda_min: f64,
    /// Largest acceptable estimate of the neglected high-energy remainder.
    pub tail_tol: f64,
    /// Cap on the number of λ-samples per mode.
    pub max_nodes: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self { cutoff: CutoffSpec::default(), lambda_max: 1e3, lambda_min: 1e-12, tail_tol: 1e-6, max_nodes: 20_000 }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_min > 0.0) || self.lambda_min >= self.cutoff.lambda0().min(1.0) {
            return Err(Error::domain(format!("lambda_min must lie in (0, min(lambda0, 1)), got {}", self.lambda_min)));
        }
        if !(self.lambda_max >= 4.0 * self.cutoff.lambda1().max(1.0)) || !self.lambda_max.is_finite() {
            return Err(Error::domain(format!(
                "lambda_max must be at least 4 max(lambda1, 1), got {}",
                self.lambda_max
            )));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::domain(format!("tail tolerance must be positive, got {}", self.tail_tol)));
        }
        Ok(())
    }

    /// Step of the finite-difference stencil at `Λ`.
    fn stencil_step(&self) -> f64 {
        0.02 * self.lambda_max.sqrt()
    }
}

/// Panel edges: geometric towards 0, then uniform in `k = √λ` up to `Λ`.
fn lambda_breaks(config: &EvolutionConfig) -> Vec<f64> {
    let mut b = graded_breaks(config.lambda_min, 1.0, 0.5);
    let kmax = config.lambda_max.sqrt();
    let panels = (2.0 * (kmax - 1.0)).ceil() as usize;
    b.extend(uniform_breaks(1.0, kmax, panels).into_iter().map(|k| k * k));
    let (l0, l1) = (config.cutoff.lambda0(), config.cutoff.lambda1());
    b.extend(uniform_breaks(l0, l1, 8));
    b.push(l0);
    b.sort_by(|a, c| a.total_cmp(c));
    b.dedup_by(|a, c| (*a - *c).abs() <= 1e-14 * c.abs());
    b
}

/// Per-mode samples `Φ = Q C` with orthonormal `Q`.
#[derive(Debug, Clone)]
struct ModeSamples {
    m: i64,
    basis: CMatrix,
    coeffs: CMatrix,
}

impl ModeSamples {
    fn compress(m: i64, phi: CMatrix) -> Self {
        let gram = &phi * phi.adjoint();
        let eig = SymmetricEigen::new(gram);
        let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&k| eig.eigenvalues[k] > 1e-26 * top).collect();
        let basis = eig.eigenvectors.select_columns(&keep);
        let coeffs = basis.adjoint() * &phi;
        Self { m, basis, coeffs }
    }

    /// `½ C diag(w) Cᴴ` in the compressed basis.
    fn core(&self, w: &[Cplx]) -> CMatrix {
        let mut scaled = self.coeffs.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= w[j] * 0.5;
        }
        scaled * self.coeffs.adjoint()
    }

    fn expand(&self, core: &CMatrix) -> CMatrix {
        &self.basis * core * self.basis.adjoint()
    }
}

/// Norms of the weighted propagator at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionSample {
    pub t: f64,
    /// `max_m ‖U_m(t)‖`.
    pub norm: f64,
    /// The same for the `χ` and `1 − χ` pieces (tail included in the latter).
    pub low: f64,
    pub high: f64,
    pub tail_estimate: f64,
    pub worst_mode: i64,
}

/// Weighted propagator of `H = H_α + V` on a radial grid, ready to be
/// evaluated at any `t > 0`.
#[derive(Debug, Clone)]
pub struct Evolver {
    flux: Flux,
    config: EvolutionConfig,
    rule: FilonRule,
    tail_nodes: [f64; 5],
    chi: Vec<f64>,
    modes: Vec<ModeSamples>,
    /// `‖E‴(Λ)‖` per mode.
    third: Vec<f64>,
}

const STENCIL: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];
const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
const D2: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
const D3: [f64; 5] = [-0.5, 1.0, 0.0, -1.0, 0.5];

impl Evolver {
    /// Samples `E(λ)` for every mode of `grid`. Fails with
    /// [`Error::Resonance`] when the zero-resonance check does not pass.
    pub fn new(flux: &Flux, v: &PotentialSpec, grid: &RadialGrid, config: EvolutionConfig) -> Result<Self> {
        config.validate()?;
        let report = check_zero_resonance(flux, v, grid)?;
        if !report.pass {
            return Err(Error::Resonance { margin: report.margin, mode: report.worst_mode });
        }
        let rule = FilonRule::new(lambda_breaks(&config))?;
        if rule.len() + 5 > config.max_nodes {
            return Err(Error::Budget(format!(
                "{} spectral samples per mode exceed the cap {}",
                rule.len() + 5,
                config.max_nodes
            )));
        }
        let step = config.stencil_step();
        let tail_nodes = STENCIL.map(|s| config.lambda_max + s * step);
        let lambdas: Vec<f64> = rule.nodes().iter().chain(&tail_nodes).copied().collect();
        let chi = rule.nodes().iter().map(|&x| smooth_cutoff(x, &config.cutoff)).collect();
        let vals = potential_values(grid, v);
        let h = weight_factors(grid, Weighting::RhoInvHalf);
        let modes: Vec<i64> = grid.modes().collect();
        let sampled: Vec<(ModeSamples, f64)> = modes
            .par_iter()
            .map(|&m| {
                let mut phi = CMatrix::zeros(grid.len(), lambdas.len());
                for (j, &lambda) in lambdas.iter().enumerate() {
                    let psi = distorted_wave_with(flux, m, lambda, &vals, grid)?;
                    for i in 0..grid.len() {
                        phi[(i, j)] = psi[i] * h[i];
                    }
                }
                let base = lambdas.len() - 5;
                let mut third = CMatrix::zeros(grid.len(), grid.len());
                for (s, c) in D3.iter().enumerate() {
                    let col: DVector<Cplx> = phi.column(base + s).into_owned();
                    third += &col * col.adjoint() * Cplx::new(0.5 * c, 0.0);
                }
                let third = spectral_norm(&third) / step.powi(3);
                Ok((ModeSamples::compress(m, phi), third))
            })
            .collect::<Result<_>>()?;
        let (modes, third) = sampled.into_iter().unzip();
        Ok(Self { flux: *flux, config, rule, tail_nodes, chi, modes, third })
    }

    pub fn flux(&self) -> &Flux {
        &self.flux
    }

    pub fn config(&self) -> &EvolutionConfig {
        &self.config
    }

    /// λ-samples per mode, tail stencil included.
    pub fn sample_count(&self) -> usize {
        self.rule.len() + self.tail_nodes.len()
    }

    /// Numerical rank of the sampled densities, per mode.
    pub fn ranks(&self) -> Vec<(i64, usize)> {
        self.modes.iter().map(|s| (s.m, s.basis.ncols())).collect()
    }

    /// Estimate of the remainder after the boundary terms at `Λ`.
    pub fn tail_estimate(&self, t: f64) -> f64 {
        self.third.iter().copied().fold(0.0, f64::max) / t.powi(4)
    }

    /// Low-energy (`χ`) and high-energy weights, the tail terms in the latter.
    fn weights(&self, t: f64) -> Result<(Vec<Cplx>, Vec<Cplx>)> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain(format!("t must be positive, got {t}")));
        }
        if t * self.config.lambda_max > super::asymptotics::PHASE_CAP {
            return Err(Error::Budget(format!("t = {t:.3e} too large for lambda_max = {}", self.config.lambda_max)));
        }
        let est = self.tail_estimate(t);
        if est > self.config.tail_tol {
            return Err(Error::Tail { estimate: est, tol: self.config.tail_tol });
        }
        let c = self.rule.weights(t);
        let mut low: Vec<Cplx> = c.iter().zip(&self.chi).map(|(w, x)| w * *x).collect();
        let mut high: Vec<Cplx> = c.iter().zip(&self.chi).map(|(w, x)| w * (1.0 - x)).collect();
        // ∫_Λ^∞ e^{−itλ} E ≈ e^{−itΛ} [E/(it) + E′/(it)² + E″/(it)³]
        let it = Cplx::new(0.0, t);
        let step = self.config.stencil_step();
        let phase = Cplx::from_polar(1.0, -t * self.config.lambda_max);
        for s in 0..5 {
            let d0 = if s == 2 { 1.0 } else { 0.0 };
            let w = phase * (d0 / it + D1[s] / (step * it * it) + D2[s] / (step * step * it * it * it));
            high.push(w);
            low.push(Cplx::new(0.0, 0.0));
        }
        Ok((low, high))
    }

    /// `ρ^{−1/2} e^{−itH} P_c ρ^{−1/2}` per mode.
    pub fn propagator(&self, t: f64) -> Result<Vec<ModeOperator>> {
        let (low, high) = self.weights(t)?;
        let total: Vec<Cplx> = low.iter().zip(&high).map(|(a, b)| a + b).collect();
        Ok(self
            .modes
            .iter()
            .map(|s| ModeOperator { m: s.m, weighting: Weighting::RhoInvHalf, matrix: s.expand(&s.core(&total)) })
            .collect())
    }

    /// Norms of the full propagator and of its two cutoff pieces.
    pub fn sample(&self, t: f64) -> Result<EvolutionSample> {
        let (low, high) = self.weights(t)?;
        let total: Vec<Cplx> = low.iter().zip(&high).map(|(a, b)| a + b).collect();
        let mut out = EvolutionSample {
            t,
            norm: 0.0,
            low: 0.0,
            high: 0.0,
            tail_estimate: self.tail_estimate(t),
            worst_mode: 0,
        };
        for s in &self.modes {
            // Q has orthonormal columns, so the norm is that of the core
            let n = spectral_norm(&s.core(&total));
            if n > out.norm {
                out.norm = n;
                out.worst_mode = s.m;
            }
            out.low = out.low.max(spectral_norm(&s.core(&low)));
            out.high = out.high.max(spectral_norm(&s.core(&high)));
        }
        Ok(out)
    }

    /// `max_m ‖U_m(t)‖` and the mode attaining it.
    pub fn norm(&self, t: f64) -> Result<(f64, i64)> {
        let (low, high) = self.weights(t)?;
        let total: Vec<Cplx> = low.iter().zip(&high).map(|(a, b)| a + b).collect();
        Ok(self
            .modes
            .iter()
            .map(|s| (spectral_norm(&s.core(&total)), s.m))
            .fold((0.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc }))
    }

    /// `max_m ‖(it)^{1+|α|} U_m(t) − L_m‖` against per-mode limits `L_m`.
    pub fn leading_error(&self, t: f64, leading: &[ModeOperator]) -> Result<f64> {
        let u = self.propagator(t)?;
        let scale = Cplx::new(0.0, t).powf(1.0 + self.flux.abs_alpha());
        let mut worst: f64 = 0.0;
        for (op, l) in u.iter().zip(leading) {
            if op.m != l.m || l.weighting != Weighting::RhoInvHalf || l.matrix.shape() != op.matrix.shape() {
                return Err(Error::domain("leading operator does not match the evolver's grid"));
            }
            worst = worst.max(spectral_norm(&(&op.matrix * scale - &l.matrix)));
        }
        Ok(worst)
    }
}

/// `ρ^{−1/2} e^{−itH} P_c ρ^{−1/2}` per mode with default numerical
/// parameters and the given cutoff.
pub fn evolve_weighted(
    flux: &Flux,
    v: &PotentialSpec,
    t: f64,
    grid: &RadialGrid,
    spec: &CutoffSpec,
) -> Result<Vec<ModeOperator>> {
    let config = EvolutionConfig { cutoff: *spec, ..EvolutionConfig::default() };
    Evolver::new(flux, v, grid, config)?.propagator(t)
}
