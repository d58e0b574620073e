use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::field::PotentialSpec;
use crate::quadrature::GaussLegendre;

/// Nodes per Gauss–Legendre panel.
pub const PANEL_NODES: usize = 8;
/// Geometrically graded panels next to the origin.
const GRADED_PANELS: usize = 2;

/// Composite Gauss–Legendre rule for `∫₀^{R} f(r) r dr` plus the window of
/// angular modes `m ∈ [−M, M]` treated on it.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    breaks: Vec<f64>,
    r_max: f64,
    mode_window: i64,
}

/// `n` is a lower bound on the node count; it is rounded up to whole panels.
pub fn build_radial_grid(r_max: f64, n: usize, mode_window: i64) -> Result<RadialGrid> {
    RadialGrid::new(r_max, n, mode_window)
}

impl RadialGrid {
    pub fn new(r_max: f64, n: usize, mode_window: i64) -> Result<Self> {
        Self::with_breakpoints(r_max, n, mode_window, &[])
    }

    /// Grid whose panel edges include `extra` (e.g. jumps of a potential).
    pub fn with_breakpoints(r_max: f64, n: usize, mode_window: i64, extra: &[f64]) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::Grid(format!("R_max must be positive, got {r_max}")));
        }
        if n < 16 {
            return Err(Error::Grid(format!("need at least 16 nodes, got {n}")));
        }
        if mode_window < 4 {
            return Err(Error::Grid(format!("mode window must be at least 4, got {mode_window}")));
        }
        let panels = n.div_ceil(PANEL_NODES);
        let graded = GRADED_PANELS.min(panels - 1);
        let uniform = panels - graded - 1;
        let h = r_max / (uniform + 1) as f64;
        let mut breaks = vec![0.0];
        for j in (1..=graded).rev() {
            breaks.push(h * 4f64.powi(-(j as i32)));
        }
        for k in 1..=uniform + 1 {
            breaks.push(if k == uniform + 1 { r_max } else { k as f64 * h });
        }
        for &b in extra {
            if b > 0.0 && b < r_max && breaks.iter().all(|&e| (e - b).abs() > 1e-12 * r_max) {
                breaks.push(b);
            }
        }
        breaks.sort_by(|a, b| a.total_cmp(b));
        let gl = GaussLegendre::new(PANEL_NODES);
        let mut nodes = Vec::with_capacity(breaks.len() * PANEL_NODES);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in breaks.windows(2) {
            for (x, g) in gl.mapped(w[0], w[1]) {
                nodes.push(x);
                weights.push(g * x);
            }
        }
        Ok(Self { nodes, weights, breaks, r_max, mode_window })
    }

    /// Grid with the potential's breakpoints as panel edges.
    pub fn for_potential(r_max: f64, n: usize, mode_window: i64, v: &PotentialSpec) -> Result<Self> {
        if v.support_radius() > r_max && !v.is_zero() {
            return Err(Error::Grid(format!(
                "potential support {} exceeds R_max = {r_max}",
                v.support_radius()
            )));
        }
        Self::with_breakpoints(r_max, n, mode_window, &v.breakpoints())
    }

    /// The same layout with every panel split in two.
    pub fn refined(&self) -> Self {
        let mut extra: Vec<f64> = self.breaks.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        extra.extend_from_slice(&self.breaks);
        let mut breaks = vec![0.0];
        extra.retain(|&b| b > 0.0 && b < self.r_max);
        breaks.extend(extra);
        breaks.push(self.r_max);
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup();
        let gl = GaussLegendre::new(PANEL_NODES);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in breaks.windows(2) {
            for (x, g) in gl.mapped(w[0], w[1]) {
                nodes.push(x);
                weights.push(g * x);
            }
        }
        Self { nodes, weights, breaks, r_max: self.r_max, mode_window: self.mode_window }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights for the measure `r dr`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn mode_window(&self) -> i64 {
        self.mode_window
    }

    pub fn modes(&self) -> RangeInclusive<i64> {
        -self.mode_window..=self.mode_window
    }

    /// Largest `d` with `∫ p(r) r dr` exact for every polynomial `p` of degree `d`.
    pub fn degree(&self) -> usize {
        2 * PANEL_NODES - 2
    }

    /// `∫₀^{R} f(r) r dr`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, &w)| w * f(r)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let g = RadialGrid::new(3.0, 96, 4).unwrap();
        assert_eq!(g.len(), 96);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(g.nodes()[0] > 0.0 && *g.nodes().last().unwrap() < 3.0);
        assert!(g.weights().iter().all(|&w| w > 0.0));
        let f = g.refined();
        assert_eq!(f.len(), 2 * g.len());
        assert!(RadialGrid::new(3.0, 8, 4).is_err());
        assert!(RadialGrid::new(3.0, 32, 3).is_err());
    }

    #[test]
    fn potential_breaks_become_panel_edges() {
        let v = PotentialSpec::well(0.8, 0.5).unwrap();
        let g = RadialGrid::for_potential(3.0, 96, 4, &v).unwrap();
        assert!(g.breaks().contains(&0.8));
        let wide = PotentialSpec::well(3.5, 0.5).unwrap();
        assert!(matches!(RadialGrid::for_potential(3.0, 96, 4, &wide), Err(Error::Grid(_))));
    }
}
