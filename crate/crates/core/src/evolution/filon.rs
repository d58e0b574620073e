//! Filon–Legendre rule for `∫ e^{−itλ} f(λ) dλ` over a union of panels.
//!
//! On each panel `f` is replaced by its degree `p−1` Legendre interpolant at
//! the Gauss nodes and the moments `∫_{−1}^{1} e^{−iωx} P_k(x) dx =
//! 2(−i)^k j_k(ω)` are used exactly, so the number of panels is set by the
//! smoothness of `f` and not by the frequency.

use crate::error::{Error, Result};
use crate::quadrature::{legendre_all, GaussLegendre};
use crate::specfun::spherical_bessel_j_seq;
use crate::Cplx;

/// Gauss nodes per panel.
pub const FILON_NODES: usize = 16;

#[derive(Debug, Clone)]
pub struct FilonRule {
    breaks: Vec<f64>,
    nodes: Vec<f64>,
    /// `g_j P_k(x_j)`, row `j`, column `k`.
    basis: Vec<[f64; FILON_NODES]>,
}

impl FilonRule {
    pub fn new(mut breaks: Vec<f64>) -> Result<Self> {
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup();
        if breaks.len() < 2 || breaks.iter().any(|b| !b.is_finite()) {
            return Err(Error::domain("Filon rule needs at least one finite panel"));
        }
        let gauss = GaussLegendre::new(FILON_NODES);
        let mut basis = Vec::with_capacity(FILON_NODES);
        for (&x, &g) in gauss.nodes.iter().zip(&gauss.weights) {
            let mut p = [0.0; FILON_NODES];
            legendre_all(FILON_NODES, x, &mut p);
            for v in p.iter_mut() {
                *v *= g;
            }
            basis.push(p);
        }
        let mut nodes = Vec::with_capacity((breaks.len() - 1) * FILON_NODES);
        for w in breaks.windows(2) {
            nodes.extend(gauss.mapped(w[0], w[1]).map(|(x, _)| x));
        }
        Ok(Self { breaks, nodes, basis })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Weights `c_j(t)` with `∫ e^{−itλ} f ≈ Σ_j c_j f(λ_j)`.
    pub fn weights(&self, t: f64) -> Vec<Cplx> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut jk = [0.0; FILON_NODES];
        for w in self.breaks.windows(2) {
            let h = 0.5 * (w[1] - w[0]);
            let c = 0.5 * (w[1] + w[0]);
            spherical_bessel_j_seq(FILON_NODES, t * h, &mut jk);
            // (2k+1)(−i)^k j_k(ω)
            let moments: Vec<Cplx> = (0..FILON_NODES)
                .map(|k| {
                    let v = (2 * k + 1) as f64 * jk[k];
                    match k % 4 {
                        0 => Cplx::new(v, 0.0),
                        1 => Cplx::new(0.0, -v),
                        2 => Cplx::new(-v, 0.0),
                        _ => Cplx::new(0.0, v),
                    }
                })
                .collect();
            let phase = Cplx::from_polar(h, -t * c);
            for row in &self.basis {
                let s: Cplx = row.iter().zip(&moments).map(|(p, m)| m * *p).sum();
                out.push(phase * s);
            }
        }
        out
    }

    /// `∫ e^{−itλ} f(λ) dλ` for a scalar `f`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, t: f64, mut f: F) -> Cplx {
        self.weights(t).iter().zip(&self.nodes).map(|(w, &x)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Breaks `lo, lo/q, lo/q², …` up to `hi` (ratio `q ∈ (0,1)`), plus `0`.
pub fn graded_breaks(lo: f64, hi: f64, q: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut x = lo;
    while x < hi {
        b.push(x);
        x /= q;
    }
    b.push(hi);
    b
}

/// `count` equal panels on `[a, b]`, excluding `a`.
pub fn uniform_breaks(a: f64, b: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|k| a + (b - a) * k as f64 / count as f64).collect()
}

/// Breaks graded geometrically towards both ends of `[a, b]`.
pub fn two_sided_breaks(a: f64, b: f64, finest: f64, q: f64, interior: usize) -> Vec<f64> {
    let mid = 0.5 * (a + b);
    let mut out = vec![a, b];
    let half = 0.25 * (b - a);
    let mut d = half;
    while d > finest {
        out.push(a + d);
        out.push(b - d);
        d *= q;
    }
    out.extend(uniform_breaks(a + half, b - half, interior));
    out.push(mid);
    out
}
