use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bqfield::fields::read_dump;
use bqfield::{Biquaternion, Complex};
use bqsim::config::Scenario;
use bqsim::identities::{check_identities, library_mul};
use bqsim::simulate::{simulate, Record, RunOptions, DIAGNOSTICS_FILE, SUMMARY_FILE};
use bqsim::CliError;
use tempfile::TempDir;

fn bqsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bqsim")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn records(dir: &Path) -> Vec<Record> {
    fs::read_to_string(dir.join(DIAGNOSTICS_FILE))
        .unwrap()
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            Record {
                step: v["step"].as_u64().unwrap() as usize,
                tau: v["tau"].as_f64().unwrap(),
                maxwell: v["maxwell"].as_f64().unwrap(),
                charge: v["charge"].as_f64().unwrap(),
                charge_open: v["charge_open"].as_f64().unwrap(),
                energy: v["energy"].as_f64().unwrap(),
                action_reaction: v["action_reaction"].as_f64(),
                thermo: v["thermo"].as_f64().unwrap(),
                stress_h: v["stress_h"].as_f64().unwrap(),
                stress_e: v["stress_e"].as_f64().unwrap(),
                w: v["w"].as_f64().unwrap(),
                q: v["q"].as_f64().unwrap(),
                delta_w: v["delta_w"].as_f64().unwrap(),
                separation: v["separation"].as_u64().unwrap() as usize,
                absorption: v["absorption"].as_u64().unwrap() as usize,
                conservation: v["conservation"].as_u64().unwrap() as usize,
            }
        })
        .collect()
}

fn plane_wave(n: usize, dt_over_h: f64, steps: usize) -> String {
    let extent = std::f64::consts::TAU;
    format!(
        r#"
kind = "free"
grid = {{ n = {n}, extent = {extent} }}
time = {{ dt = {dt}, steps = {steps} }}

[[fields]]
tension = {{ profile = "plane_wave", k = [1.0, 0.0, 0.0], polarization = [0.0, 0.0, 1.0] }}
"#,
        dt = dt_over_h * extent / n as f64
    )
}

#[test]
fn dt_above_the_bound_names_dt() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "bad.toml", &plane_wave(16, 1.0, 10));
    let out = bqsim(&["simulate", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("time.dt"), "{}", stderr(&out));
}

#[test]
fn unknown_keys_and_bad_flags_are_validation_errors() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "typo.toml", &plane_wave(16, 0.25, 2).replace("steps", "stpes"));
    let out = bqsim(&["simulate", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("stpes"), "{}", stderr(&out));

    let cfg = write(tmp.path(), "ok.toml", &plane_wave(16, 0.25, 2));
    let out = bqsim(&["simulate", &cfg, "--order", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = bqsim(&["simulate", &cfg, "--dump-every", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--dump-every"));

    let out = bqsim(&["simulate", tmp.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn plane_wave_records_and_discretization_bound() {
    // An evolved plane wave satisfies the semi-discrete system exactly, so the
    // Maxwell residual is the time-stencil error, bounded by C(h² + dτ²).
    let mut residuals = Vec::new();
    for n in [16, 32] {
        let tmp = TempDir::new().unwrap();
        let cfg = write(tmp.path(), "pw.toml", &plane_wave(n, 0.25, 10));
        let out = bqsim(&["simulate", &cfg, "--out", tmp.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let recs = records(tmp.path());
        assert_eq!(recs.len(), 10);
        assert_eq!(recs[0].step, 1);
        assert!(recs.iter().all(|r| r.charge == 0.0 && r.action_reaction.is_none()));
        let h = std::f64::consts::TAU / n as f64;
        let dt = 0.25 * h;
        let worst = recs.iter().map(|r| r.maxwell).fold(0.0, f64::max);
        assert!(worst <= 0.2 * (h * h + dt * dt), "n = {n}: {worst}");
        residuals.push(worst);
        let summary = fs::read_to_string(tmp.path().join(SUMMARY_FILE)).unwrap();
        assert!(summary.starts_with("kind,quantity,max_abs,final\nfree,maxwell,"));
    }
    let rate = (residuals[0] / residuals[1]).log2();
    assert!((rate - 2.0).abs() < 0.3, "rate {rate}");
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/interact.toml");
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        let out = bqsim(&["simulate", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    for file in [DIAGNOSTICS_FILE, SUMMARY_FILE] {
        assert_eq!(fs::read(a.path().join(file)).unwrap(), fs::read(b.path().join(file)).unwrap(), "{file}");
    }
}

#[test]
fn blow_up_aborts_with_context_and_keeps_partial_output() {
    // A stiff coupling makes RK4 unstable at this step, so the run overflows.
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "stiff.toml",
        r#"
kind = "background"
kappa = 0.001
grid = { n = 8, h = 0.5 }
time = { dt = 0.25, steps = 200 }

[[fields]]
charge = { profile = "uniform", value = [0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0] }

[background]
profile = "uniform"
value = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]
"#,
    );
    let out = bqsim(&["simulate", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("step") && err.contains("theta[0]") || err.contains("non-finite"), "{err}");
    let recs = records(tmp.path());
    assert!(!recs.is_empty() && recs.len() < 200);
    assert!(recs.iter().all(|r| r.maxwell.is_finite() && r.energy.is_finite()));
    assert!(tmp.path().join(SUMMARY_FILE).exists());
}

#[test]
fn dumps_are_written_every_k_steps() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "pw.toml", &plane_wave(8, 0.25, 4));
    let out = bqsim(&["simulate", &cfg, "--out", tmp.path().to_str().unwrap(), "--dump-every", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let dumps = tmp.path().join("dumps");
    let mut names: Vec<String> = fs::read_dir(&dumps)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    // States 0..=4 are recorded; the extra state that centres the last record is not.
    assert_eq!(
        names,
        ["step000000", "step000002", "step000004"]
            .iter()
            .flat_map(|s| [format!("{s}_field0_a.bqf"), format!("{s}_field0_theta.bqf")])
            .collect::<Vec<_>>()
    );
    let (header, field) = read_dump(&mut fs::File::open(dumps.join("step000002_field0_a.bqf")).unwrap()).unwrap();
    assert!((header.tau - 2.0 * 0.25 * std::f64::consts::TAU / 8.0).abs() < 1e-12);
    assert_eq!(field.grid().n(), 8);
}

#[test]
fn identities_command() {
    let out = bqsim(&["identities", "--seed", "1", "--count", "1000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("associativity") && l.ends_with("PASS")));
    assert!(!text.contains("FAIL"));

    let out = bqsim(&["identities", "--seed", "1", "--count", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--count"));
}

#[test]
fn corrupted_product_fails_associativity() {
    fn skewed(a: Biquaternion, b: Biquaternion) -> Biquaternion {
        a * b + Biquaternion::scalar(Complex::new(1e-6, 0.0))
    }
    let r = check_identities(1, 100, skewed).unwrap();
    let assoc = r.iter().find(|i| i.name == "associativity").unwrap();
    assert!(!assoc.passed && assoc.max_residual > 1e-8);
    assert!(check_identities(1, 100, library_mul).unwrap().iter().all(|i| i.passed));
}

#[test]
fn checks_write_reports() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    for (cmd, file) in [("lorentz-check", "lorentz.toml"), ("cauchy-check", "cauchy.toml")] {
        let tmp = TempDir::new().unwrap();
        let out = bqsim(&[cmd, root.join(file).to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", stderr(&out));
        let report: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(tmp.path().join("report.json")).unwrap()).unwrap();
        assert_eq!(report["passed"], true);
    }
}

#[test]
fn library_entry_points_validate() {
    let sc = Scenario::from_toml(&plane_wave(16, 0.25, 1).replace("kind = \"free\"", "kind = \"lorentz_check\"")).unwrap();
    let tmp = TempDir::new().unwrap();
    let opts = RunOptions::resolve(&sc, Some(tmp.path().into()), None, None).unwrap();
    // Missing `boost` is caught before the kind mismatch.
    match simulate(&sc, &opts) {
        Err(e @ CliError::Config { .. }) => {
            assert_eq!(e.exit_code(), 1);
            assert!(e.to_string().contains("boost"));
        }
        other => panic!("{other:?}"),
    }
}
