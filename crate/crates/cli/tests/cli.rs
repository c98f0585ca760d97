use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ris_dps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ris-dps"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_sample(dir: &Path, n: &str, phases: Option<&str>) -> String {
    let mut args = vec!["sample", "--elements", n, "--seed", "3"];
    if let Some(p) = phases {
        args.extend(["--phases", p]);
    }
    let o = ris_dps(&args);
    assert!(o.status.success());
    let path = dir.join(format!("real_{n}.json"));
    fs::write(&path, stdout(&o)).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_preset_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = ris_dps(&[
            "run",
            "--scenario",
            "fig10",
            "--out",
            out.to_str().unwrap(),
            "--fast",
            "--seed",
            "9",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let csv_a = fs::read(a.join("fig10.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.join("fig10.csv")).unwrap());
    let text = String::from_utf8(csv_a).unwrap();
    assert!(text.starts_with("x,mean_se_sweep,std_se_sweep,mean_se_cpp,std_se_cpp,gain_pct\n"));
    assert_eq!(text.lines().count(), 10);

    let meta: serde_json::Value =
        serde_json::from_slice(&fs::read(a.join("fig10.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 9);
    assert_eq!(meta["trials"], 100);
    assert!(meta["git_describe"].is_string());
    assert!(meta["timestamp_unix"].as_u64().unwrap() > 0);
}

#[test]
fn run_scenario_file_with_region_dump() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = r#"{"name": "mine", "n_elements": 20, "phases": {"kind": "uniform", "k": 2},
        "trials": 5, "seed": 4, "solvers": ["sweep", "cpp", "continuous_ub"],
        "axis": {"kind": "snr_budget_db", "values": [100, 110]},
        "empty_ratio": true, "region_dump": true}"#;
    let file = dir.path().join("mine.json");
    fs::write(&file, scenario).unwrap();
    let out = dir.path().join("out");
    let o = ris_dps(&[
        "run",
        "--scenario",
        file.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--sequential",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("mine.csv")).unwrap();
    assert!(csv
        .lines()
        .next()
        .unwrap()
        .ends_with("gain_pct,empty_ratio"));
    let regions = fs::read_to_string(out.join("mine_regions.csv")).unwrap();
    assert_eq!(regions.lines().count(), 41);
}

#[test]
fn invalid_scenarios_fail() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = ris_dps(&["run", "--scenario", "fig99", "--out", out]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("fig99"));

    let file = dir.path().join("bad.json");
    fs::write(
        &file,
        r#"{"name": "bad", "n_elements": 4, "phases": {"kind": "uniform", "k": 2},
        "trials": 0, "seed": 1, "solvers": ["sweep"]}"#,
    )
    .unwrap();
    let o = ris_dps(&["run", "--scenario", file.to_str().unwrap(), "--out", out]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("trials"));
}

#[test]
fn solvers_agree_on_small_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sample(dir.path(), "6", None);
    let amp = |solver: &str| {
        let o = ris_dps(&[
            "solve",
            "--input",
            &input,
            "--phases",
            "pi/6,5pi/6",
            "--solver",
            solver,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["configuration"].as_array().unwrap().len(), 6);
        v["amplitude"].as_f64().unwrap()
    };
    let sweep = amp("sweep");
    assert!((sweep - amp("exhaustive")).abs() <= 1e-12 * sweep);
    assert!(amp("cpp") <= sweep * (1.0 + 1e-12));
}

#[test]
fn phases_come_from_file_when_omitted() {
    let dir = tempfile::tempdir().unwrap();
    let with = write_sample(dir.path(), "4", Some("0,pi"));
    assert!(ris_dps(&["solve", "--input", &with]).status.success());

    let without = write_sample(dir.path(), "5", None);
    let o = ris_dps(&["solve", "--input", &without]);
    assert!(!o.status.success());
    assert!(
        !ris_dps(&["solve", "--input", &without, "--phases", "1,0.5"])
            .status
            .success()
    );
}

#[test]
fn regions_lists_every_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sample(dir.path(), "50", None);
    let o = ris_dps(&["regions", "--input", &input, "--phases", "pi/6,5pi/6"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(
        text.lines().next().unwrap(),
        "center_rad,half_width_rad,element,kind"
    );
    assert_eq!(text.lines().count(), 151);
    assert!(String::from_utf8_lossy(&o.stderr).contains("measured_ratio="));
}

#[test]
fn list_shows_presets() {
    let o = ris_dps(&["list"]);
    let text = stdout(&o);
    for name in ["fig9", "fig13", "fig15-k3"] {
        assert!(text.lines().any(|l| l == name));
    }
}
