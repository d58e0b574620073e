use std::f64::consts::PI;
use std::fs;

use abdisp_core::evolution::{
    erdelyi_integral, erdelyi_leading_term, fit_decay_exponent, jensen_kato_residual, CutoffSpec, Evolver,
    JensenKato,
};
use abdisp_core::propagator::{
    mode_propagator_kernel, pointwise_bound_envelope, propagator_kernel, propagator_leading_term,
};
use abdisp_core::resolvent::{
    free_resolvent_kernel, g0_half_flux_closed_form, low_energy_remainder, threshold_kernel, ThresholdKernelId,
};
use abdisp_core::scattering::{
    check_zero_resonance, discretize_mode_kernel, leading_operator, positive_energy_margin, RadialGrid, Weighting,
};
use abdisp_core::specfun::{bessel_jy, gamma, Order};
use abdisp_core::{Cplx, Error, Flux, PolarPoint, PotentialSpec};
use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Kind, RunConfig};
use crate::report::{fmt, Summary, Table};

pub fn run(cfg: &RunConfig) -> Result<Summary> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let mut summary = Summary::default();
    summary.put("command", cfg.kind.name());
    summary.num("alpha_raw", cfg.alpha_raw);
    summary.num("alpha", cfg.flux.alpha());
    for (k, v) in &cfg.settings {
        if k != "alpha" {
            summary.put(&format!("setting.{k}"), v);
        }
    }
    match cfg.kind {
        Kind::Propagator => propagator(cfg, &mut summary)?,
        Kind::Resolvent => resolvent(cfg, &mut summary)?,
        Kind::Evolve => evolve(cfg, &mut summary)?,
        Kind::Selftest => selftest(cfg, &mut summary)?,
    }
    summary.write(&cfg.out)?;
    Ok(summary)
}

fn flux_comment(cfg: &RunConfig) -> String {
    if cfg.alpha_raw == cfg.flux.alpha() {
        format!("alpha={}", cfg.flux.alpha())
    } else {
        format!("alpha_raw={} reduced to alpha={}", cfg.alpha_raw, cfg.flux.alpha())
    }
}

fn propagator(cfg: &RunConfig, summary: &mut Summary) -> Result<()> {
    let (x, y) = (&cfg.x, &cfg.y);
    let rows: Vec<(f64, Cplx, i64, f64, Cplx)> = cfg
        .times
        .par_iter()
        .map(|&t| {
            let k = propagator_kernel(&cfg.flux, t, x, y, cfg.tol)?;
            let env = pointwise_bound_envelope(&cfg.flux, t, x, y)?;
            let lead = propagator_leading_term(&cfg.flux, t, x, y)?;
            Ok((t, k.value, k.truncation_m, env, lead))
        })
        .collect::<abdisp_core::Result<_>>()?;
    let mut table = Table::new(&[
        "t", "r", "rp", "dtheta", "re_k", "im_k", "abs_k", "envelope", "re_lead", "im_lead", "ratio_re", "ratio_im",
    ]);
    table.comment(flux_comment(cfg));
    table.comment("ratio = K / leading term; nan where the leading term vanishes");
    let (mut c, mut c0, mut trunc) = (0.0f64, 0.0f64, 0i64);
    let mut last_ratio = Cplx::new(f64::NAN, f64::NAN);
    for &(t, k, m, env, lead) in &rows {
        c = c.max(k.norm() / env);
        c0 = c0.max(k.norm() * t);
        trunc = trunc.max(m);
        let ratio = if lead.norm() > 0.0 { k / lead } else { Cplx::new(f64::NAN, f64::NAN) };
        last_ratio = ratio;
        table.row(vec![
            fmt(t),
            fmt(x.r()),
            fmt(y.r()),
            fmt(x.theta() - y.theta()),
            fmt(k.re),
            fmt(k.im),
            fmt(k.norm()),
            fmt(env),
            fmt(lead.re),
            fmt(lead.im),
            fmt(ratio.re),
            fmt(ratio.im),
        ]);
    }
    table.write(&cfg.out, "propagator.csv")?;
    summary.put("points", rows.len());
    summary.num("C", c);
    summary.num("C0", c0);
    summary.put("max_truncation_m", trunc);
    summary.num("leading_ratio_last_re", last_ratio.re);
    summary.num("leading_ratio_last_im", last_ratio.im);
    Ok(())
}

fn fitted_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = xs.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Largest `|R₀(λ,x,y) − R₀(1,√λx,√λy)|` over seeded random samples.
fn scaling_samples(flux: &Flux, count: usize, tol: f64) -> Result<Vec<[f64; 6]>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let lambda = 10f64.powf(rng.gen_range(-2.0..1.0));
        let r = rng.gen_range(0.2..2.0);
        let rp = r * rng.gen_range(1.2..3.0);
        let (th, thp) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
        let x = PolarPoint::new(r, th)?;
        let y = PolarPoint::new(rp, thp)?;
        let k = lambda.sqrt();
        let lhs = free_resolvent_kernel(flux, lambda, &x, &y, tol)?;
        let rhs = free_resolvent_kernel(flux, 1.0, &x.scaled(k)?, &y.scaled(k)?, tol)?;
        out.push([lambda, r, rp, th, thp, (lhs - rhs).norm()]);
    }
    Ok(out)
}

fn resolvent(cfg: &RunConfig, summary: &mut Summary) -> Result<()> {
    let flux = &cfg.flux;
    if cfg.checks.scaling {
        let samples = scaling_samples(flux, 100, cfg.tol)?;
        let mut table = Table::new(&["lambda", "r", "rp", "theta", "theta_p", "residual"]);
        table.comment(flux_comment(cfg));
        let mut worst = 0.0f64;
        for s in &samples {
            worst = worst.max(s[5]);
            table.row(s.iter().map(|&v| fmt(v)).collect());
        }
        table.write(&cfg.out, "scaling.csv")?;
        summary.num("scaling_max_residual", worst);
        summary.put("scaling_pass", worst < 1e-10);
    }
    if cfg.checks.g0_closed_form {
        let mut table = Table::new(&["ratio", "series", "closed_form", "difference"]);
        table.comment(flux_comment(cfg));
        let mut worst = 0.0f64;
        for k in 0..=47 {
            let ratio = 0.01 + 0.02 * k as f64;
            let th = 0.3;
            let series = threshold_kernel(ThresholdKernelId::G0, flux, &PolarPoint::new(ratio, th)?, &PolarPoint::new(1.0, th)?)?;
            let closed = g0_half_flux_closed_form(ratio);
            let d = (series.re - closed).abs().max(series.im.abs());
            worst = worst.max(d);
            table.row(vec![fmt(ratio), fmt(series.re), fmt(closed), fmt(d)]);
        }
        table.write(&cfg.out, "g0_closed_form.csv")?;
        summary.num("g0_max_difference", worst);
        summary.put("g0_pass", worst < 1e-10);
    }
    if cfg.checks.expansion_slope {
        let mut table = Table::new(&["lambda", "re", "im", "abs"]);
        table.comment(flux_comment(cfg));
        let (mut lx, mut ly) = (Vec::new(), Vec::new());
        for k in 0..=16 {
            let lambda = 10f64.powf(-4.0 + 2.0 * k as f64 / 16.0);
            let rem = low_energy_remainder(flux, lambda, &cfg.x, &cfg.y)?;
            lx.push(lambda.ln());
            ly.push(rem.norm().ln());
            table.row(vec![fmt(lambda), fmt(rem.re), fmt(rem.im), fmt(rem.norm())]);
        }
        table.write(&cfg.out, "remainder.csv")?;
        let slope = fitted_slope(&lx, &ly);
        summary.num("remainder_slope", slope);
        summary.num("next_exponent", flux.next_exponent());
        summary.put("slope_pass", slope >= flux.next_exponent() + 0.2);
    }
    Ok(())
}

fn evolve(cfg: &RunConfig, summary: &mut Summary) -> Result<()> {
    let grid = cfg.grid.as_ref().expect("validated evolve config has a grid");
    let v = &cfg.potential;
    summary.put("potential", &cfg.potential_source);
    summary.put("grid_nodes", grid.len());

    let resonance = check_zero_resonance(&cfg.flux, v, grid)?;
    let mut table = Table::new(&["m", "min_singular_value"]);
    table.comment(flux_comment(cfg));
    for &(m, s) in &resonance.modes {
        table.row(vec![m.to_string(), fmt(s)]);
    }
    table.write(&cfg.out, "resonance.csv")?;
    summary.num("resonance_margin", resonance.margin);
    summary.put("resonance_worst_mode", resonance.worst_mode);
    if !resonance.pass {
        summary.write(&cfg.out)?;
        return Err(Error::Resonance { margin: resonance.margin, mode: resonance.worst_mode }.into());
    }

    let margin = positive_energy_margin(&cfg.flux, v, grid, &cfg.lambdas)?;
    let mut table = Table::new(&["lambda", "min_singular_value"]);
    table.comment(flux_comment(cfg));
    for &(l, s) in &margin.samples {
        table.row(vec![fmt(l), fmt(s)]);
    }
    table.write(&cfg.out, "positive_margin.csv")?;
    summary.num("positive_margin", margin.margin);
    summary.num("positive_margin_lambda", margin.lambda_at_min);

    let ev = Evolver::new(&cfg.flux, v, grid, cfg.evolution)?;
    summary.put("spectral_samples", ev.sample_count());
    let samples: Vec<_> = cfg.times.par_iter().map(|&t| ev.sample(t)).collect::<abdisp_core::Result<_>>()?;
    let a = cfg.flux.abs_alpha();
    let mut table = Table::new(&["t", "norm", "scaled_norm", "low", "high", "tail_estimate", "worst_mode"]);
    table.comment(flux_comment(cfg));
    table.comment("norm = max over modes of |rho^-1/2 e^{-itH} P_c rho^-1/2|; scaled_norm = t^{1+|alpha|} norm");
    for s in &samples {
        table.row(vec![
            fmt(s.t),
            fmt(s.norm),
            fmt(s.norm * s.t.powf(1.0 + a)),
            fmt(s.low),
            fmt(s.high),
            fmt(s.tail_estimate),
            s.worst_mode.to_string(),
        ]);
    }
    table.write(&cfg.out, "norms.csv")?;
    let norms: Vec<f64> = samples.iter().map(|s| s.norm).collect();
    let fit = fit_decay_exponent(&cfg.times, &norms)?;
    summary.num("fit_exponent", fit.exponent);
    summary.num("fit_amplitude", fit.amplitude);
    summary.num("fit_residual", fit.residual);
    summary.num("fit_t_min", fit.window.0);
    summary.num("fit_t_max", fit.window.1);
    summary.num("expected_exponent", 1.0 + a);
    summary.num("tail_estimate_max", samples.iter().map(|s| s.tail_estimate).fold(0.0, f64::max));

    let lead = leading_operator(&cfg.flux, v, grid)?;
    let lead_norm = lead.iter().map(|o| o.norm()).fold(0.0, f64::max);
    let errs: Vec<f64> =
        cfg.times.par_iter().map(|&t| ev.leading_error(t, &lead)).collect::<abdisp_core::Result<_>>()?;
    let mut table = Table::new(&["t", "error", "relative_error"]);
    table.comment(flux_comment(cfg));
    table.comment("error = max over modes of |(it)^{1+|alpha|} U(t) - L|");
    for (&t, &e) in cfg.times.iter().zip(&errs) {
        table.row(vec![fmt(t), fmt(e), fmt(e / lead_norm)]);
    }
    table.write(&cfg.out, "leading.csv")?;
    let t_top = cfg.times[cfg.times.len() - 1];
    let upper: Vec<f64> = cfg.times.iter().zip(&errs).filter(|(&t, _)| t >= t_top / 10.0).map(|(_, &e)| e).collect();
    summary.num("leading_norm", lead_norm);
    summary.num("leading_error_last", errs[errs.len() - 1]);
    summary.put("leading_monotone_upper_decade", upper.windows(2).all(|w| w[1] < w[0]));
    Ok(())
}

struct Check {
    name: &'static str,
    value: f64,
    pass: bool,
}

fn selftest(cfg: &RunConfig, summary: &mut Summary) -> Result<()> {
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for &x in &[0.3, 1.7, 4.5, 11.2, 33.3] {
        worst = worst.max((gamma(x + 1.0)? / (x * gamma(x)?) - 1.0).abs());
    }
    checks.push(Check { name: "gamma_recurrence", value: worst, pass: worst < 1e-12 });

    let mut worst = 0.0f64;
    for &nu in &[0.1, 0.25, 0.75, 3.4] {
        for &x in &[0.05, 1.0, 7.5, 40.0] {
            let a = bessel_jy(Order::new(nu)?, x)?;
            let b = bessel_jy(Order::new(nu + 1.0)?, x)?;
            let w = b.j * a.y - a.j * b.y;
            worst = worst.max((w * PI * x / 2.0 - 1.0).abs());
        }
    }
    checks.push(Check { name: "bessel_wronskian", value: worst, pass: worst < 1e-10 });

    let mut worst = 0.0f64;
    for &x in &[0.01, 0.5, 3.0, 25.0, 120.0] {
        let p = bessel_jy(Order::new(0.5)?, x)?;
        let want = (2.0 / (PI * x)).sqrt() * x.sin();
        worst = worst.max((p.j - want).abs() / (2.0 / (PI * x)).sqrt());
    }
    checks.push(Check { name: "bessel_half_integer", value: worst, pass: worst < 1e-12 });

    let s = scaling_samples(&cfg.flux, 20, 1e-13)?.iter().map(|s| s[5]).fold(0.0, f64::max);
    checks.push(Check { name: "resolvent_scaling", value: s, pass: s < 1e-10 });

    let half = Flux::new(0.5)?;
    let mut worst = 0.0f64;
    for &ratio in &[0.01, 0.3, 0.6, 0.95] {
        let g = threshold_kernel(ThresholdKernelId::G0, &half, &PolarPoint::new(ratio, 0.0)?, &PolarPoint::new(1.0, 0.0)?)?;
        worst = worst.max((g.re - g0_half_flux_closed_form(ratio)).abs());
    }
    checks.push(Check { name: "g0_half_flux_closed_form", value: worst, pass: worst < 1e-10 });

    let r = erdelyi_integral(0.5, 1e3, &CutoffSpec::default())? / erdelyi_leading_term(0.5, 1e3);
    let d = (r - 1.0).norm();
    checks.push(Check { name: "erdelyi_ratio", value: d, pass: d < 0.05 });

    let jk: Vec<f64> = [1e2, 1e3, 1e4].iter().map(|&t| jensen_kato_residual(JensenKato::A1, t)).collect::<abdisp_core::Result<_>>()?;
    checks.push(Check { name: "jensen_kato_a1", value: jk[2], pass: jk.windows(2).all(|w| w[1] < w[0]) });

    let ts: Vec<f64> = (0..12).map(|k| 10f64.powf(1.0 + k as f64 / 4.0)).collect();
    let ns: Vec<f64> = ts.iter().map(|t| t.powf(-1.25)).collect();
    let e = (fit_decay_exponent(&ts, &ns)?.exponent - 1.25).abs();
    checks.push(Check { name: "decay_fit", value: e, pass: e < 1e-12 });

    let grid = RadialGrid::new(3.0, 48, 4)?;
    let ev = Evolver::new(&cfg.flux, &PotentialSpec::zero(), &grid, Default::default())?;
    let mut worst = 0.0f64;
    for op in ev.propagator(2.0)? {
        let k = discretize_mode_kernel(op.m, |r, rp| mode_propagator_kernel(op.m, &cfg.flux, 2.0, r, rp), &grid, Weighting::RhoInvHalf)?;
        worst = worst.max((&op.matrix - &k.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    checks.push(Check { name: "free_evolution_vs_kernel", value: worst, pass: worst < 1e-4 });

    let mut table = Table::new(&["check", "value", "pass"]);
    let mut failed = 0;
    for c in &checks {
        println!("{} {} {:e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value);
        table.row(vec![c.name.to_string(), fmt(c.value), c.pass.to_string()]);
        summary.put(&format!("check.{}", c.name), c.pass);
        failed += usize::from(!c.pass);
    }
    table.write(&cfg.out, "selftest.csv")?;
    summary.put("failed", failed);
    if failed > 0 {
        summary.write(&cfg.out)?;
        bail!("{failed} selftest check(s) failed");
    }
    Ok(())
}
