use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use abdisp_core::scattering::{manufacture_critical_potential, RadialGrid};
use abdisp_core::{Flux, PotentialSpec};

fn abdisp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abdisp")).args(args).output().expect("spawn abdisp")
}

fn summary(dir: &Path) -> BTreeMap<String, String> {
    fs::read_to_string(dir.join("summary.txt"))
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once(" = ").map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}

fn value(s: &BTreeMap<String, String>, key: &str) -> f64 {
    s[key].parse().unwrap_or_else(|_| panic!("{key} = {}", s[key]))
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL_GRID: [&str; 6] = ["--n", "32", "--t", "1e2:1e4:4", "--lambda", "1e-3:1e3:1"];

#[test]
fn propagator_reports_reduced_flux() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    let o = abdisp(&["propagator", "--alpha", "0.75", "--t", "1e2:1e4:2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(out.join("propagator.csv")).unwrap();
    assert!(table.starts_with("# alpha_raw=0.75 reduced to alpha=-0.25"), "{table}");
    let s = summary(&out);
    assert_eq!(value(&s, "alpha"), -0.25);
    // ratio to the leading term within 3 t^{-(1-2|α|)} at t = 10⁴
    let ratio = value(&s, "leading_ratio_last_re");
    assert!((ratio - 1.0).abs() < 3.0 * 1e4f64.powf(-0.5), "{ratio}");
    assert!(value(&s, "C").is_finite() && value(&s, "C0").is_finite());
}

#[test]
fn propagator_half_flux_antipodal_null() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    let o = abdisp(&[
        "propagator",
        "--alpha",
        "0.5",
        "--dtheta",
        "3.14159265",
        "--t",
        "1e2:1e3:2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(out.join("propagator.csv")).unwrap();
    let mut rows = table.lines().filter(|l| !l.starts_with('#')).skip(1);
    let row: Vec<f64> = rows.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    let (t, lead) = (row[0], (row[8].powi(2) + row[9].powi(2)).sqrt());
    // 1 + e^{∓iΔθ} vanishes up to the rounding of π in the flag
    assert!(lead < 1e-7 * t.powf(-1.5), "{lead}");
}

#[test]
fn resolvent_checks() {
    let dir = tempfile::tempdir().unwrap();
    for (args, keys) in [
        (vec!["--alpha", "0.25", "--scaling-check"], vec!["scaling_pass"]),
        (vec!["--alpha", "0.5", "--g0-closed-form"], vec!["g0_pass"]),
        (vec!["--alpha", "0.25", "--expansion-slope"], vec!["slope_pass"]),
    ] {
        let out = dir.path().join(args[2].trim_start_matches('-'));
        let mut full = vec!["resolvent"];
        full.extend(&args);
        full.extend(["--out", out.to_str().unwrap()]);
        let o = abdisp(&full);
        assert!(o.status.success(), "{}", stderr(&o));
        let s = summary(&out);
        for k in keys {
            assert_eq!(s[k], "true", "{args:?}");
        }
    }
    let out = dir.path().join("bad");
    let o = abdisp(&["resolvent", "--alpha", "0.25", "--g0-closed-form", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn evolve_free_half_flux() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e");
    let mut args = vec!["evolve", "--alpha", "0.5", "--potential", "none", "--out", out.to_str().unwrap()];
    args.extend(SMALL_GRID);
    let o = abdisp(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = summary(&out);
    assert!((value(&s, "fit_exponent") - 1.5).abs() < 0.1);
    assert_eq!(s["leading_monotone_upper_decade"], "true");
    assert!(value(&s, "leading_error_last") < 1e-3 * value(&s, "leading_norm"));
    for f in ["norms.csv", "leading.csv", "resonance.csv", "positive_margin.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn evolve_resonant_potential_exits_with_assumption_status() {
    let dir = tempfile::tempdir().unwrap();
    let flux = Flux::new(0.25).unwrap();
    let well = PotentialSpec::well(1.0, -1.0).unwrap();
    let grid = RadialGrid::for_potential(3.0, 32, 4, &well).unwrap();
    let resonant = manufacture_critical_potential(&flux, &well, &grid, 0).unwrap();
    let tbl = dir.path().join("resonant.tbl");
    fs::write(&tbl, resonant.to_text()).unwrap();
    let out = dir.path().join("e");
    let mut args = vec!["evolve", "--potential", tbl.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend(SMALL_GRID);
    let o = abdisp(&args);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("zero-resonance assumption violated"), "{}", stderr(&o));
    assert!(value(&summary(&out), "resonance_margin") < 1e-6);
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let tbl = dir.path().join("barrier.tbl");
    fs::write(&tbl, "# support_radius=0.8 bound=0.5 kind=piecewise\n0.8 0.5\n").unwrap();
    let out = dir.path().join("e");
    let mut args = vec!["evolve", "--potential", tbl.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend(SMALL_GRID);
    let read = || -> Vec<(String, Vec<u8>)> {
        let mut v: Vec<_> = fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
            })
            .collect();
        v.sort();
        v
    };
    assert!(abdisp(&args).status.success());
    let first = read();
    args.extend(["--jobs", "1"]);
    assert!(abdisp(&args).status.success());
    let second = read();
    assert_eq!(first.len(), 5);
    for ((na, a), (nb, b)) in first.iter().zip(&second) {
        assert_eq!(na, nb);
        if na != "summary.txt" {
            assert!(a == b, "{na} differs");
        }
    }
    // summaries differ only in the recorded jobs setting
    let strip = |b: &[u8]| -> String {
        String::from_utf8_lossy(b).lines().filter(|l| !l.starts_with("setting.jobs")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(first[4].0, "summary.txt");
    assert_eq!(strip(&first[4].1), strip(&second[4].1));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# sweep\nalpha = 0.1\nt = 1e2:1e3:2\nr = 0.5\n").unwrap();
    let out = dir.path().join("p");
    let o = abdisp(&["propagator", "--config", cfg.to_str().unwrap(), "--alpha", "0.25", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = summary(&out);
    assert_eq!(value(&s, "alpha"), 0.25);
    assert_eq!(s["setting.r"], "0.5");
    assert_eq!(value(&s, "points"), 3.0);
}

#[test]
fn malformed_configs_are_rejected_before_computation() {
    let dir = tempfile::tempdir().unwrap();
    let wide = dir.path().join("wide.tbl");
    fs::write(&wide, "# support_radius=4 bound=1 kind=piecewise\n4 -1\n").unwrap();
    let bad_table = dir.path().join("bad.tbl");
    fs::write(&bad_table, "0.5 -1\n").unwrap();
    let corpus: Vec<(&str, String)> = vec![
        ("propagator", "alpha = 1".into()),
        ("propagator", "alpha = abc".into()),
        ("propagator", "alpha 0.25".into()),
        ("propagator", "alpha = 0.2\nalpha = 0.3".into()),
        ("propagator", "bogus = 1".into()),
        ("propagator", "t = 1e4:1e2:12".into()),
        ("propagator", "t = 1:10".into()),
        ("propagator", "tol = -1".into()),
        ("propagator", "jobs = -2".into()),
        ("propagator", "r = -1".into()),
        ("propagator", "r = nan".into()),
        ("propagator", "potential = none".into()),
        ("resolvent", "scaling_check = maybe".into()),
        ("resolvent", "r = 1\nrp = 1\ndtheta = 0\nexpansion_slope = true".into()),
        ("evolve", "n = 8".into()),
        ("evolve", "r_max = 0".into()),
        ("evolve", "modes = 2".into()),
        ("evolve", "potential = /nonexistent/v.tbl".into()),
        ("evolve", format!("potential = {}", wide.display())),
        ("evolve", format!("potential = {}", bad_table.display())),
        ("evolve", "lambda0 = 3".into()),
        ("evolve", "lambda_max = 2".into()),
        ("evolve", "t = 1e2:1e3:12".into()),
        ("evolve", "t = 1e2:1e4:2".into()),
        ("evolve", "lambda = 1e3:1e-3:4".into()),
        ("evolve", "t = 1e2:1e10:12".into()),
    ];
    for (k, (cmd, text)) in corpus.iter().enumerate() {
        let cfg = dir.path().join(format!("bad{k}.cfg"));
        fs::write(&cfg, text).unwrap();
        let out = dir.path().join(format!("out{k}"));
        let o = abdisp(&[cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{cmd} {text:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
        assert!(!out.exists(), "{cmd} {text:?} produced output");
    }
    let o = abdisp(&["propagator", "--config", "/nonexistent.cfg"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = abdisp(&["selftest", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 9);
    assert!(!text.contains("FAIL"));
}
