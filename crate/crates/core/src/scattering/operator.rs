use std::fmt::{self, Write as _};

use nalgebra::{DMatrix, DVector};

use super::grid::RadialGrid;
use crate::error::{Error, Result};
use crate::{CMatrix, Cplx};

/// Radial weight applied on both sides of an operator kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    Plain,
    /// `e^{−r⁴/2}` per side: the norm of `B(ρ, ρ⁻¹)`.
    RhoInvHalf,
    /// `e^{−r⁴}` per side, as in the Hilbert–Schmidt bound.
    RhoInv,
}

impl Weighting {
    pub fn factor(self, r: f64) -> f64 {
        match self {
            Self::Plain => 1.0,
            Self::RhoInvHalf => (-0.5 * r.powi(4)).exp(),
            Self::RhoInv => (-r.powi(4)).exp(),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Self::Plain => "plain",
            Self::RhoInvHalf => "rho^-1/2",
            Self::RhoInv => "rho^-1",
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Nyström matrix of one angular mode of an integral operator.
///
/// Entries are `h(r_i) K(r_i, r_j) h(r_j) √(w_i w_j)` for the weighting `h`,
/// so the spectral norm approximates the weighted operator norm on
/// `L²(ℝ₊, r dr)` and the Frobenius norm its Hilbert–Schmidt norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    pub m: i64,
    pub weighting: Weighting,
    pub matrix: CMatrix,
}

impl ModeOperator {
    /// Largest singular value.
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    pub fn frobenius(&self) -> f64 {
        self.matrix.norm()
    }

    /// Re-express under another weighting.
    pub fn reweighted(&self, grid: &RadialGrid, to: Weighting) -> Self {
        if to == self.weighting {
            return self.clone();
        }
        let s: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&r| to.factor(r) / self.weighting.factor(r))
            .collect();
        Self { m: self.m, weighting: to, matrix: scale_both(&self.matrix, &s) }
    }

    /// `max |A − Aᴴ| / max |A|`.
    pub fn hermitian_defect(&self) -> f64 {
        let a = &self.matrix;
        let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * Cplx::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Row-major text table with a header line.
    pub fn to_text(&self, lambda: Option<f64>) -> String {
        let n = self.matrix.nrows();
        let mut s = format!("# m={} weighting={} n={n}", self.m, self.weighting);
        if let Some(l) = lambda {
            let _ = write!(s, " lambda={l:.17e}");
        }
        s.push('\n');
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| {
                    let z = self.matrix[(i, j)];
                    format!("{:.17e} {:.17e}", z.re, z.im)
                })
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

pub(crate) fn spectral_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.max()
}

pub(crate) fn smallest_singular_value(a: &CMatrix) -> f64 {
    a.clone().svd(false, false).singular_values.min()
}

/// `diag(s) A diag(s)`.
pub(crate) fn scale_both(a: &CMatrix, s: &[f64]) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * (s[i] * s[j]))
}

pub(crate) fn weight_factors(grid: &RadialGrid, w: Weighting) -> Vec<f64> {
    grid.nodes().iter().map(|&r| w.factor(r)).collect()
}

pub(crate) fn sqrt_weights(grid: &RadialGrid) -> Vec<f64> {
    grid.weights().iter().map(|w| w.sqrt()).collect()
}

/// Symmetric Nyström matrix `√w_i K(r_i, r_j) √w_j` of a kernel that is
/// finite on the diagonal.
pub(crate) fn plain_matrix<F>(grid: &RadialGrid, mut kernel: F) -> Result<CMatrix>
where
    F: FnMut(f64, f64) -> Result<Cplx>,
{
    let r = grid.nodes();
    let sw = sqrt_weights(grid);
    let n = r.len();
    let mut a = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let k = match kernel(r[i], r[j]) {
                Err(Error::Diagonal) if i == j => {
                    // integrable diagonal singularity: average the neighbours
                    let d = 1e-4;
                    (kernel(r[i], r[i] * (1.0 - d))? + kernel(r[i], r[i] * (1.0 + d))?) * 0.5
                }
                other => other?,
            };
            if !k.re.is_finite() || !k.im.is_finite() {
                return Err(Error::Singular(format!("kernel not finite at ({}, {})", r[i], r[j])));
            }
            a[(i, j)] = k * (sw[i] * sw[j]);
        }
    }
    Ok(a)
}

/// Discretise a per-mode kernel `K(r, r′)` (taken against `r′ dr′`).
pub fn discretize_mode_kernel<F>(m: i64, kernel: F, grid: &RadialGrid, weighting: Weighting) -> Result<ModeOperator>
where
    F: FnMut(f64, f64) -> Result<Cplx>,
{
    let plain = plain_matrix(grid, kernel)?;
    let s = weight_factors(grid, weighting);
    Ok(ModeOperator { m, weighting, matrix: scale_both(&plain, &s) })
}

pub(crate) fn real_to_complex(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| Cplx::new(x, 0.0))
}

pub(crate) fn complex_vector(v: &[f64]) -> DVector<Cplx> {
    DVector::from_iterator(v.len(), v.iter().map(|&x| Cplx::new(x, 0.0)))
}
