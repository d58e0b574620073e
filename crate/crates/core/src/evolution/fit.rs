use crate::error::{Error, Result};

/// Least-squares power law `norm ≈ amplitude · t^{−exponent}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    pub amplitude: f64,
    /// RMS residual in `ln(norm)`.
    pub residual: f64,
    pub window: (f64, f64),
}

pub const MIN_SAMPLES: usize = 8;
pub const MIN_DECADES: f64 = 1.5;

pub fn fit_decay_exponent(times: &[f64], norms: &[f64]) -> Result<DecayFit> {
    if times.len() != norms.len() {
        return Err(Error::Data(format!("{} times but {} norms", times.len(), norms.len())));
    }
    if times.len() < MIN_SAMPLES {
        return Err(Error::Data(format!("need at least {MIN_SAMPLES} samples, got {}", times.len())));
    }
    if let Some(t) = times.iter().find(|&&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::Data(format!("times must be positive, got {t}")));
    }
    if let Some(n) = norms.iter().find(|&&n| !(n > 0.0) || !n.is_finite()) {
        return Err(Error::Data(format!("norms must be positive, got {n}")));
    }
    let lo = times.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = times.iter().copied().fold(0.0, f64::max);
    if (hi / lo).log10() < MIN_DECADES {
        return Err(Error::Data(format!("times span {:.3} decades, need {MIN_DECADES}", (hi / lo).log10())));
    }
    let x: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok(DecayFit { exponent: -slope, amplitude: intercept.exp(), residual: (ss / k).sqrt(), window: (lo, hi) })
}

/// `per_decade` log-spaced times on `[lo, hi]`, both ends included.
pub fn time_ladder(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi > lo) || per_decade == 0 {
        return Err(Error::domain(format!("bad time ladder {lo}:{hi}:{per_decade}")));
    }
    let steps = ((hi / lo).log10() * per_decade as f64).round().max(1.0) as usize;
    Ok((0..=steps).map(|k| lo * (hi / lo).powf(k as f64 / steps as f64)).collect())
}
