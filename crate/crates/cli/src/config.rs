//! Command-line flags, `key = value` config files and the validated run
//! configuration built from both.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use abdisp_core::evolution::{time_ladder, CutoffSpec, EvolutionConfig, MIN_DECADES, MIN_SAMPLES};
use abdisp_core::scattering::{log_grid, RadialGrid};
use abdisp_core::{Flux, PolarPoint, PotentialSpec};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "abdisp", version, about = "Aharonov-Bohm propagator, resolvent and decay-rate harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the free propagator kernel along a time ladder.
    Propagator(PropagatorArgs),
    /// Scaling, closed-form and threshold-expansion checks of the free resolvent.
    Resolvent(ResolventArgs),
    /// Weighted evolution of H = H_alpha + V, decay fit and leading-operator convergence.
    Evolve(EvolveArgs),
    /// Run the quick invariant suite.
    Selftest(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// File of `key = value` lines; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Truncation tolerance; for `evolve` the high-energy tail tolerance.
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<String>,
    /// Worker threads; 0 uses all cores.
    #[arg(long)]
    pub jobs: Option<String>,
    /// Raw flux; reduced into (-1/2, 1/2].
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PointArgs {
    /// Radius of x.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    /// Radius of y.
    #[arg(long, allow_hyphen_values = true)]
    pub rp: Option<String>,
    /// Angle θ_x − θ_y.
    #[arg(long, allow_hyphen_values = true)]
    pub dtheta: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct PropagatorArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub point: PointArgs,
    /// Time ladder `start:stop:points_per_decade`.
    #[arg(long)]
    pub t: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ResolventArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub point: PointArgs,
    /// Random-sample check of R₀(λ; x, y) = R₀(1; √λx, √λy).
    #[arg(long)]
    pub scaling_check: bool,
    /// Half-flux G₀ against (1/π) artanh √(r_</r_>).
    #[arg(long)]
    pub g0_closed_form: bool,
    /// Log-log slope of the threshold-expansion remainder.
    #[arg(long)]
    pub expansion_slope: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Potential table, or `none`.
    #[arg(long)]
    pub potential: Option<String>,
    /// Time ladder `start:stop:points_per_decade`.
    #[arg(long)]
    pub t: Option<String>,
    /// Outer radius of the radial grid.
    #[arg(long)]
    pub r_max: Option<String>,
    /// Radial nodes (rounded up to whole panels).
    #[arg(long)]
    pub n: Option<String>,
    /// Angular modes |m| <= M.
    #[arg(long)]
    pub modes: Option<String>,
    /// Energies for the positive-energy margin, `start:stop:points_per_decade`.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Upper end of the λ quadrature; beyond it a boundary-term tail is used.
    #[arg(long)]
    pub lambda_max: Option<String>,
    /// Smooth cutoff equals 1 below this energy.
    #[arg(long)]
    pub lambda0: Option<String>,
    /// Smooth cutoff vanishes above this energy.
    #[arg(long)]
    pub lambda1: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Propagator,
    Resolvent,
    Evolve,
    Selftest,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Propagator => "propagator",
            Kind::Resolvent => "resolvent",
            Kind::Evolve => "evolve",
            Kind::Selftest => "selftest",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        const COMMON: [&str; 4] = ["out", "tol", "jobs", "alpha"];
        match self {
            Kind::Propagator => &["out", "tol", "jobs", "alpha", "t", "r", "rp", "dtheta"],
            Kind::Resolvent => &[
                "out",
                "tol",
                "jobs",
                "alpha",
                "r",
                "rp",
                "dtheta",
                "scaling_check",
                "g0_closed_form",
                "expansion_slope",
            ],
            Kind::Evolve => &[
                "out",
                "tol",
                "jobs",
                "alpha",
                "potential",
                "t",
                "r_max",
                "n",
                "modes",
                "lambda",
                "lambda_max",
                "lambda0",
                "lambda1",
            ],
            Kind::Selftest => &COMMON,
        }
    }
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected 'key = value', got '{line}'", idx + 1))?;
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            bail!("config line {}: empty key or value", idx + 1);
        }
        if map.insert(key.clone(), value.to_string()).is_some() {
            bail!("config line {}: duplicate key '{key}'", idx + 1);
        }
    }
    Ok(map)
}

fn load_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_config_text(&text).with_context(|| format!("in {}", path.display()))
}

/// Which of the resolvent checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolventChecks {
    pub scaling: bool,
    pub g0_closed_form: bool,
    pub expansion_slope: bool,
}

/// Fully validated parameters of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kind: Kind,
    pub alpha_raw: f64,
    pub flux: Flux,
    pub out: PathBuf,
    pub tol: f64,
    pub jobs: Option<usize>,
    pub t_spec: String,
    pub times: Vec<f64>,
    pub x: PolarPoint,
    pub y: PolarPoint,
    pub checks: ResolventChecks,
    pub potential_source: String,
    pub potential: PotentialSpec,
    pub grid: Option<RadialGrid>,
    pub lambda_spec: String,
    pub lambdas: Vec<f64>,
    pub evolution: EvolutionConfig,
    /// Every setting as resolved, for the summary record.
    pub settings: BTreeMap<String, String>,
}

fn num(settings: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    let v = &settings[key];
    let x: f64 = v.parse().map_err(|_| anyhow!("{key}: '{v}' is not a number"))?;
    if !x.is_finite() {
        bail!("{key}: '{v}' is not finite");
    }
    Ok(x)
}

fn count(settings: &BTreeMap<String, String>, key: &str) -> Result<usize> {
    let v = &settings[key];
    v.parse().map_err(|_| anyhow!("{key}: '{v}' is not a non-negative integer"))
}

fn flag(settings: &BTreeMap<String, String>, key: &str) -> Result<bool> {
    match settings[key].as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => bail!("{key}: expected true or false, got '{other}'"),
    }
}

/// `start:stop:points_per_decade`.
pub fn parse_ladder(key: &str, spec: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, c] = parts.as_slice() else {
        bail!("{key}: expected start:stop:points_per_decade, got '{spec}'");
    };
    let lo: f64 = a.trim().parse().map_err(|_| anyhow!("{key}: bad start '{a}'"))?;
    let hi: f64 = b.trim().parse().map_err(|_| anyhow!("{key}: bad stop '{b}'"))?;
    let per: usize = c.trim().parse().map_err(|_| anyhow!("{key}: bad points per decade '{c}'"))?;
    if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() || per == 0 {
        bail!("{key}: need 0 < start < stop and points per decade >= 1, got '{spec}'");
    }
    Ok((lo, hi, per))
}

fn defaults(kind: Kind) -> BTreeMap<String, String> {
    let mut d: BTreeMap<String, String> = [
        ("out", "abdisp-out"),
        ("jobs", "0"),
        ("alpha", "0.25"),
        ("r", "1"),
        ("rp", "1"),
        ("dtheta", "0"),
        ("potential", "none"),
        ("r_max", "3"),
        ("n", "96"),
        ("modes", "4"),
        ("lambda", "1e-3:1e3:4"),
        ("lambda_max", "1e3"),
        ("lambda0", "0.5"),
        ("lambda1", "2"),
        ("scaling_check", "false"),
        ("g0_closed_form", "false"),
        ("expansion_slope", "false"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect();
    let (t, tol) = match kind {
        Kind::Propagator => ("1e1:1e4:12", "1e-12"),
        Kind::Resolvent => ("1e1:1e4:12", "1e-13"),
        Kind::Evolve => ("1e2:1e4:12", "1e-6"),
        Kind::Selftest => ("1e1:1e4:12", "1e-10"),
    };
    if kind == Kind::Resolvent {
        // off the diagonal, as the threshold expansion needs x != y
        for (k, v) in [("r", "0.7"), ("rp", "1.3"), ("dtheta", "0.9")] {
            d.insert(k.into(), v.into());
        }
    }
    d.insert("t".into(), t.into());
    d.insert("tol".into(), tol.into());
    d.retain(|k, _| kind.keys().contains(&k.as_str()));
    d
}

fn overlay(map: &mut BTreeMap<String, String>, key: &str, v: &Option<String>) {
    if let Some(v) = v {
        map.insert(key.to_string(), v.clone());
    }
}

fn common_flags(map: &mut BTreeMap<String, String>, c: &CommonArgs) {
    if let Some(out) = &c.out {
        map.insert("out".into(), out.display().to_string());
    }
    overlay(map, "tol", &c.tol);
    overlay(map, "jobs", &c.jobs);
    overlay(map, "alpha", &c.alpha);
}

fn point_flags(map: &mut BTreeMap<String, String>, p: &PointArgs) {
    overlay(map, "r", &p.r);
    overlay(map, "rp", &p.rp);
    overlay(map, "dtheta", &p.dtheta);
}

impl RunConfig {
    /// Merge defaults, the config file and flags, then validate everything
    /// before any computation starts.
    pub fn from_command(command: &Command) -> Result<Self> {
        let (kind, common) = match command {
            Command::Propagator(a) => (Kind::Propagator, &a.common),
            Command::Resolvent(a) => (Kind::Resolvent, &a.common),
            Command::Evolve(a) => (Kind::Evolve, &a.common),
            Command::Selftest(a) => (Kind::Selftest, a),
        };
        let mut settings = defaults(kind);
        if let Some(path) = &common.config {
            for (k, v) in load_config(path)? {
                if !kind.keys().contains(&k.as_str()) {
                    bail!("config key '{k}' is not used by '{}'", kind.name());
                }
                settings.insert(k, v);
            }
        }
        common_flags(&mut settings, common);
        match command {
            Command::Propagator(a) => {
                point_flags(&mut settings, &a.point);
                overlay(&mut settings, "t", &a.t);
            }
            Command::Resolvent(a) => {
                point_flags(&mut settings, &a.point);
                for (key, on) in [
                    ("scaling_check", a.scaling_check),
                    ("g0_closed_form", a.g0_closed_form),
                    ("expansion_slope", a.expansion_slope),
                ] {
                    if on {
                        settings.insert(key.into(), "true".into());
                    }
                }
            }
            Command::Evolve(a) => {
                overlay(&mut settings, "potential", &a.potential);
                overlay(&mut settings, "t", &a.t);
                overlay(&mut settings, "r_max", &a.r_max);
                overlay(&mut settings, "n", &a.n);
                overlay(&mut settings, "modes", &a.modes);
                overlay(&mut settings, "lambda", &a.lambda);
                overlay(&mut settings, "lambda_max", &a.lambda_max);
                overlay(&mut settings, "lambda0", &a.lambda0);
                overlay(&mut settings, "lambda1", &a.lambda1);
            }
            Command::Selftest(_) => {}
        }
        Self::validate(kind, settings)
    }

    fn validate(kind: Kind, settings: BTreeMap<String, String>) -> Result<Self> {
        let alpha_raw = num(&settings, "alpha")?;
        let flux = Flux::new(alpha_raw).context("alpha")?;
        let out = PathBuf::from(&settings["out"]);
        let tol = num(&settings, "tol")?;
        if !(tol > 0.0 && tol < 1.0) {
            bail!("tol must lie in (0, 1), got {tol}");
        }
        let jobs = match count(&settings, "jobs")? {
            0 => None,
            j => Some(j),
        };
        let mut cfg = RunConfig {
            kind,
            alpha_raw,
            flux,
            out,
            tol,
            jobs,
            t_spec: String::new(),
            times: Vec::new(),
            x: PolarPoint::new(1.0, 0.0)?,
            y: PolarPoint::new(1.0, 0.0)?,
            checks: ResolventChecks { scaling: false, g0_closed_form: false, expansion_slope: false },
            potential_source: "none".into(),
            potential: PotentialSpec::zero(),
            grid: None,
            lambda_spec: String::new(),
            lambdas: Vec::new(),
            evolution: EvolutionConfig::default(),
            settings: BTreeMap::new(),
        };
        if let Some(t) = settings.get("t") {
            let (lo, hi, per) = parse_ladder("t", t)?;
            cfg.t_spec = t.clone();
            cfg.times = time_ladder(lo, hi, per)?;
        }
        if settings.contains_key("r") {
            let (r, rp, dth) = (num(&settings, "r")?, num(&settings, "rp")?, num(&settings, "dtheta")?);
            if !(r > 0.0) || !(rp > 0.0) {
                bail!("r and rp must be positive, got {r}, {rp}");
            }
            cfg.x = PolarPoint::new(r, dth).context("r/dtheta")?;
            cfg.y = PolarPoint::new(rp, 0.0).context("rp")?;
        }
        if kind == Kind::Resolvent {
            let mut checks = ResolventChecks {
                scaling: flag(&settings, "scaling_check")?,
                g0_closed_form: flag(&settings, "g0_closed_form")?,
                expansion_slope: flag(&settings, "expansion_slope")?,
            };
            if !(checks.scaling || checks.g0_closed_form || checks.expansion_slope) {
                checks = ResolventChecks { scaling: true, g0_closed_form: flux.is_half(), expansion_slope: true };
            }
            if checks.g0_closed_form && !flux.is_half() {
                bail!("--g0-closed-form needs |alpha| = 1/2 after reduction, got {}", flux.alpha());
            }
            if checks.expansion_slope && cfg.x.distance(&cfg.y) == 0.0 {
                bail!("--expansion-slope needs x != y");
            }
            cfg.checks = checks;
        }
        if kind == Kind::Evolve {
            let source = settings["potential"].clone();
            cfg.potential = if source == "none" {
                PotentialSpec::zero()
            } else {
                PotentialSpec::from_file(&source).with_context(|| format!("potential {source}"))?
            };
            cfg.potential_source = source;
            let (r_max, n, modes) = (num(&settings, "r_max")?, count(&settings, "n")?, count(&settings, "modes")?);
            let modes = i64::try_from(modes).map_err(|_| anyhow!("modes: {modes} too large"))?;
            cfg.grid = Some(RadialGrid::for_potential(r_max, n, modes, &cfg.potential)?);
            let cutoff = CutoffSpec::new(num(&settings, "lambda0")?, num(&settings, "lambda1")?)?;
            cfg.evolution = EvolutionConfig {
                cutoff,
                lambda_max: num(&settings, "lambda_max")?,
                tail_tol: tol,
                ..EvolutionConfig::default()
            };
            cfg.evolution.validate()?;
            let (lo, hi, per) = parse_ladder("lambda", &settings["lambda"])?;
            cfg.lambda_spec = settings["lambda"].clone();
            cfg.lambdas = log_grid(lo, hi, per)?;
            let (t0, t1) = (cfg.times[0], cfg.times[cfg.times.len() - 1]);
            if cfg.times.len() < MIN_SAMPLES || (t1 / t0).log10() < MIN_DECADES {
                bail!("t ladder '{}' too short for a decay fit: need {MIN_SAMPLES} points over {MIN_DECADES} decades", cfg.t_spec);
            }
            if t1 * cfg.evolution.lambda_max > abdisp_core::evolution::PHASE_CAP {
                bail!("t up to {t1} with lambda_max {} exceeds the phase cap", cfg.evolution.lambda_max);
            }
        }
        cfg.settings = settings;
        Ok(cfg)
    }
}
