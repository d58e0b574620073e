use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Taylor coefficients of `1/Γ(1+z)` about `z = 0`.
const INV_GAMMA_1P: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

fn lanczos_sum(x: f64) -> f64 {
    // x here is already shifted by -1
    let mut a = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// Γ(x) for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("gamma requires x > 0, got {x}")));
    }
    Ok(gamma_pos(x))
}

pub(crate) fn gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        return gamma_pos(x + 1.0) / x;
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    let a = lanczos_sum(xm);
    if x < 140.0 {
        (2.0 * PI).sqrt() * t.powf(xm + 0.5) * (-t).exp() * a
    } else {
        ((xm + 0.5) * t.ln() - t + ((2.0 * PI).sqrt() * a).ln()).exp()
    }
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        return ln_gamma_pos(x + 1.0) - x.ln();
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    (xm + 0.5) * t.ln() - t + ((2.0 * PI).sqrt() * lanczos_sum(xm)).ln()
}

/// Γ on the whole real line except the poles, via reflection.
pub(crate) fn gamma_real(x: f64) -> f64 {
    if x > 0.0 {
        gamma_pos(x)
    } else {
        PI / ((PI * x).sin() * gamma_pos(1.0 - x))
    }
}

/// Temme's auxiliary quantities for `|mu| <= 1/2`:
/// `gam1 = (1/Γ(1-μ) - 1/Γ(1+μ)) / (2μ)`, `gam2 = (1/Γ(1-μ) + 1/Γ(1+μ)) / 2`,
/// `gampl = 1/Γ(1+μ)`, `gammi = 1/Γ(1-μ)`.
pub(crate) fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mut odd = 0.0;
    let mut even = 0.0;
    for (j, &c) in INV_GAMMA_1P.iter().enumerate().rev() {
        if j % 2 == 1 {
            odd = odd * mu * mu + c;
        } else {
            even = even * mu * mu + c;
        }
    }
    // 1/Γ(1+μ) = even(μ²) + μ·odd(μ²)
    let gampl = even + mu * odd;
    let gammi = even - mu * odd;
    (-odd, even, gampl, gammi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_values() {
        let sp = PI.sqrt();
        assert!((gamma(0.5).unwrap() - sp).abs() < 1e-14 * sp);
        assert!((gamma(1.5).unwrap() - sp / 2.0).abs() < 1e-14);
        assert!((gamma(2.25).unwrap() / gamma(1.25).unwrap() - 1.25).abs() < 1e-14);
    }

    #[test]
    fn integer_factorials() {
        let mut f = 1.0;
        for n in 1..30 {
            let g = gamma(n as f64).unwrap();
            assert!((g - f).abs() <= 1e-13 * f, "n={n} {g} {f}");
            f *= n as f64;
        }
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.1, 0.7, 3.3, 17.0, 44.5, 120.0] {
            let a = ln_gamma(x).unwrap();
            let b = gamma(x).unwrap().ln();
            assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.5).is_err());
        assert!(ln_gamma(0.0).is_err());
    }

    #[test]
    fn reflection_matches_recurrence() {
        // Γ(x) = Γ(x+1)/x on the negative axis
        for &x in &[-0.25, -0.75, -1.3, -2.6] {
            let lhs = gamma_real(x);
            let rhs = gamma_real(x + 1.0) / x;
            assert!((lhs - rhs).abs() < 1e-13 * lhs.abs());
        }
    }

    #[test]
    fn temme_gammas_consistent() {
        for &mu in &[-0.5, -0.31, -1e-9, 0.0, 1e-7, 0.2, 0.5] {
            let (g1, g2, gp, gm) = temme_gammas(mu);
            assert!((gp - 1.0 / gamma_pos(1.0 + mu)).abs() < 1e-15);
            assert!((gm - 1.0 / gamma_pos(1.0 - mu)).abs() < 1e-15);
            assert!((g2 - 0.5 * (gp + gm)).abs() < 1e-15);
            if mu.abs() > 1e-3 {
                assert!((g1 - (gm - gp) / (2.0 * mu)).abs() < 1e-13);
            }
        }
        // gam1(0) = -γ_E
        assert!((temme_gammas(0.0).0 + 0.577_215_664_901_532_9).abs() < 1e-16);
    }
}
