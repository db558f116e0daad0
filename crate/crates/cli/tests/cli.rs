use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kharper(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kharper"))
        .args(args)
        .current_dir(dir)
        .env_remove("KHARPER_WORKERS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn butterfly_without_kicks_is_the_free_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "b.json",
        r#"{"command": "butterfly", "model": {"kind": "resonant-dkrm"}, "ratio1": 0, "ratio2": 0,
            "s_max": 5, "theta_count": 4, "output": "free"}"#,
    );
    let out = kharper(&["butterfly", "--config", &cfg], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("free_spectrum.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "hbar_num,hbar_den,hbar,theta,quasienergy");
    let mut rows = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 5);
        // the two free evolutions cancel on the main resonance
        let eps: f64 = f[4].parse().unwrap();
        assert!(eps.abs() < 1e-12, "{line}");
        rows += 1;
    }
    assert!(rows > 0);
    assert!(dir.path().join("free_spectrum_plot.py").exists());
}

#[test]
fn butterfly_bytes_do_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str, w: &'static str| {
        vec![
            "butterfly", "--kind", "resonant-dkrm", "--ratio1", "2.0", "--ratio2", "1.0", "--s-max", "8",
            "--theta-count", "8", "--output", out, "--workers", w,
        ]
    };
    assert_eq!(code(&kharper(&args("one", "1"), dir.path())), 0);
    assert_eq!(code(&kharper(&args("four", "4"), dir.path())), 0);
    assert_eq!(code(&kharper(&args("again", "4"), dir.path())), 0);
    let a = fs::read(dir.path().join("one_spectrum.csv")).unwrap();
    let b = fs::read(dir.path().join("four_spectrum.csv")).unwrap();
    let c = fs::read(dir.path().join("again_spectrum.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(b, c);

    // rows sorted by (hbar, theta, quasienergy), floats round-trip
    let text = String::from_utf8(a).unwrap();
    let rows: Vec<(f64, f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<f64> = l.split(',').skip(2).map(|x| x.parse().unwrap()).collect();
            (f[0], f[1], f[2])
        })
        .collect();
    assert!(rows.windows(2).all(|w| w[0] <= w[1]));
    for l in text.lines().skip(1) {
        for field in l.split(',').skip(2) {
            let v: f64 = field.parse().unwrap();
            assert_eq!(format!("{v:.16e}"), field);
        }
    }
}

#[test]
fn evolve_without_kicks_has_zero_variance() {
    let dir = tempfile::tempdir().unwrap();
    let out = kharper(
        &["evolve", "--kind", "resonant-dkrm", "--k1", "0", "--k2", "0", "--hbar", "1.0", "--n-steps", "50", "--output", "zero"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("zero_diffusion.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "step,variance,edge_mass");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 50);
    for row in rows {
        let v: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, 0.0);
    }
    let summary = read_json(&dir.path().join("zero_summary.json"));
    assert!(summary["alpha"].is_null());
    assert_eq!(summary["classification"], "localized");
}

#[test]
fn evolve_summary_reports_fit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "e.json",
        r#"{"command": "evolve", "model": {"kind": "resonant-dkrm", "k1": 4.0, "k2": 0.4, "hbar": 1.0},
            "n_steps": 5000, "record_every": 1, "fit_window": [10, 400], "output": "runs/ballistic"}"#,
    );
    // the flag wins over the config's n_steps
    let out = kharper(&["run", "--config", &cfg, "--n-steps", "400"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(&dir.path().join("runs/ballistic_summary.json"));
    let alpha = summary["alpha"].as_f64().unwrap();
    assert!(alpha > 1.8, "{alpha}");
    assert_eq!(summary["classification"], "ballistic");
    assert_eq!(summary["window"], serde_json::json!([10, 400]));
    assert!((summary["final_norm"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    let rows = fs::read_to_string(dir.path().join("runs/ballistic_diffusion.csv")).unwrap().lines().count();
    assert_eq!(rows, 401);
}

#[test]
fn lattice_cap_exhaustion_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = kharper(
        &[
            "evolve", "--kind", "resonant-dkrm", "--k1", "4.0", "--k2", "0.4", "--hbar", "1", "--n-steps", "5000",
            "--lattice-cap", "512",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), "u.json", r#"{"command": "evolve", "n_stepz": 3}"#);
    assert_eq!(code(&kharper(&["run", "--config", &unknown], dir.path())), 2);

    let bad_range = write_config(dir.path(), "r.json", r#"{"command": "butterfly", "s_max": 0}"#);
    assert_eq!(code(&kharper(&["run", "--config", &bad_range], dir.path())), 2);

    let mismatch = write_config(dir.path(), "m.json", r#"{"command": "fractal"}"#);
    assert_eq!(code(&kharper(&["evolve", "--config", &mismatch], dir.path())), 2);

    // spectra need the exact rational form of hbar
    let out = kharper(&["fractal", "--kind", "khm", "--k1", "1", "--k2", "1", "--hbar", "2.4"], dir.path());
    assert_eq!(code(&out), 2);

    let out = kharper(&["evolve", "--kind", "khm", "--k1", "-1", "--k2", "1", "--hbar", "1"], dir.path());
    assert_eq!(code(&out), 2);

    let out = Command::new(env!("CARGO_BIN_EXE_kharper"))
        .args(["evolve", "--kind", "khm", "--k1", "1", "--k2", "1", "--hbar", "1", "--n-steps", "5"])
        .current_dir(dir.path())
        .env("KHARPER_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn symmetry_checks_pass_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.json",
        r#"{"command": "check-symmetries", "ratio1": 2.0, "ratio2": 1.3, "theta_count": 8,
            "claims": [{"claim": "khm-period", "rational": "1/3"},
                       {"claim": "dkrm-reflection", "rational": "1/5"},
                       {"claim": "swap", "rational": "2/5"}],
            "output": "good"}"#,
    );
    let out = kharper(&["run", "--config", &cfg], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let report = read_json(&dir.path().join("good_symmetries.json"));
    assert_eq!(report["all_passed"], true);
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    assert_eq!(checks[0]["partner"], "4/3");
    assert_eq!(checks[1]["partner"], "9/5");
    for c in checks {
        assert!(c["distance"].as_f64().unwrap() < 1e-8);
        assert_eq!(c["tolerance"].as_f64().unwrap(), 1e-8);
    }

    let bad = write_config(
        dir.path(),
        "p.json",
        r#"{"command": "check-symmetries", "theta_count": 8,
            "claims": [{"claim": "swap", "rational": "2/5", "kind": "resonant-dkrm", "perturbation": 0.1}],
            "output": "bad"}"#,
    );
    let out = kharper(&["run", "--config", &bad], dir.path());
    assert_eq!(code(&out), 5);
    let report = read_json(&dir.path().join("bad_symmetries.json"));
    assert_eq!(report["all_passed"], false);
    assert!(report["checks"][0]["distance"].as_f64().unwrap() > 1e-4);
}

#[test]
fn fractal_writes_box_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = kharper(
        &["fractal", "--kind", "khm", "--k1", "1", "--k2", "1", "--hbar", "2pi*21/55", "--theta-count", "16", "--output", "f"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(&dir.path().join("f_fractal.json"));
    assert_eq!(summary["points"], 55 * 16);
    let d0 = summary["d0"].as_f64().unwrap();
    assert!(d0 > 0.0 && d0 < 1.0, "{d0}");
    let boxes = fs::read_to_string(dir.path().join("f_boxcount.csv")).unwrap();
    assert!(boxes.starts_with("boxes,occupied,fitted\n"));
    let spectrum = fs::read_to_string(dir.path().join("f_spectrum.csv")).unwrap();
    assert_eq!(spectrum.lines().count(), 55 * 16 + 1);
}

#[test]
fn classical_writes_orbits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"command": "classical", "model": {"kind": "resonant-dkrm", "k1": 1.0, "k2": 0.5},
            "n_orbits": 3, "n_iter": 10, "output": "c"}"#,
    );
    let out = kharper(&["classical", "--config", &cfg], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("c_orbits.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "orbit,step,q,p");
    assert_eq!(lines.count(), 3 * 11);
    assert!(dir.path().join("c_orbits_plot.py").exists());
}

#[test]
fn shipped_example_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert!(v["command"].is_string(), "{}", path.display());
    }
}
