use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::{CMatrix, Cplx};

/// Angular Fourier coefficient `f_m(r_i) = (1/2π) ∫ e^{−imθ} u(r_i, θ) dθ`.
///
/// `u` holds samples with rows indexed by radius and columns by the uniform
/// angles `θ_j = 2πj/N`. The trapezoid rule is exact for trigonometric
/// polynomials of degree below `N`.
pub fn project_mode(u: &CMatrix, m: i64) -> Result<Vec<Cplx>> {
    let n = u.ncols();
    let need = 4 * (m.unsigned_abs() as usize + 1);
    if n < need {
        return Err(Error::Resolution { samples: n, mode: m });
    }
    let phases: Vec<Cplx> = (0..n)
        .map(|j| Cplx::from_polar(1.0 / n as f64, -(m as f64) * TAU * j as f64 / n as f64))
        .collect();
    Ok(u.row_iter()
        .map(|row| row.iter().zip(&phases).map(|(v, p)| v * p).sum())
        .collect())
}

/// `Σ_m f_m(r_i) e^{imθ_j}` on `n_theta` uniform angles; `coeffs[k]` is mode
/// `m_min + k`.
pub fn reconstruct(coeffs: &[Vec<Cplx>], m_min: i64, n_theta: usize) -> CMatrix {
    let nr = coeffs.first().map_or(0, Vec::len);
    CMatrix::from_fn(nr, n_theta, |i, j| {
        let theta = TAU * j as f64 / n_theta as f64;
        coeffs
            .iter()
            .enumerate()
            .map(|(k, f)| f[i] * Cplx::from_polar(1.0, (m_min + k as i64) as f64 * theta))
            .sum()
    })
}
