use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use poleflow::output::{read_drift_json, read_events_json, read_trajectory_csv};

fn poleflow(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poleflow"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn run_writes_trajectory_events_drift_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = poleflow(&["run", "snell-step"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(dir.path(), "snell-step.trajectory.csv");
    assert!(csv.starts_with("t,x1,y1,x2,y2\n"));
    assert!(read_trajectory_csv(&csv).unwrap().len() > 100);
    let events_text = read(dir.path(), "snell-step.events.json");
    let raw: serde_json::Value = serde_json::from_str(&events_text).unwrap();
    let keys: Vec<&str> = raw[0]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    assert_eq!(keys.len(), 5);
    for k in ["kind", "t", "pole", "x", "y"] {
        assert!(keys.contains(&k));
    }
    let events = read_events_json(&events_text).unwrap();
    assert_eq!(
        events
            .iter()
            .filter(|e| e.kind == poleflow::EventKind::BoundaryCrossing)
            .count(),
        2
    );
    let drift = read_drift_json(&read(dir.path(), "snell-step.drift.json")).unwrap();
    assert_eq!(drift.len(), 2);
    assert!(drift.iter().all(|d| d.max_rel_drift < 1e-6));
    let raw: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "snell-step.drift.json")).unwrap();
    for k in ["quantity", "max_abs_drift", "max_rel_drift", "per_segment"] {
        assert!(raw[0].get(k).is_some(), "{k}");
    }
    assert!(read(dir.path(), "snell-step.svg").starts_with("<svg"));
}

#[test]
fn format_flag_limits_outputs_and_runs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = poleflow(&["run", "mirror-step", "--format", "csv"], d.path());
        assert_eq!(out.status.code(), Some(0));
    }
    let names: Vec<String> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(names.len(), 6);
    assert!(names.iter().all(|n| n.ends_with(".trajectory.csv")));
    for n in names {
        assert_eq!(read(a.path(), &n), read(b.path(), &n));
    }
}

#[test]
fn malformed_scenario_is_a_config_error_with_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.toml");
    fs::write(
        &file,
        "schema_version = 1\nname = \"bad\"\n\n[seabed]\nkind = \"radial-step\"\nradius = -1.0\ninside = 1.0\noutside = 2.0\n\n[pair]\ncenter = [0.0, 0.0]\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = poleflow(&["run", file.to_str().unwrap()], &out_dir);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("radius"));
    assert!(!out_dir.exists());

    fs::write(
        &file,
        "schema_version = 1\nname = \"bad\"\n[seabed]\nkind = \"wavy\"\n",
    )
    .unwrap();
    let out = poleflow(&["run", file.to_str().unwrap()], &out_dir);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn failed_members_make_a_partial_run() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sinks.toml");
    fs::write(
        &file,
        r#"schema_version = 1
name = "sinks"

[seabed]
kind = "constant"
value = 1.0

[[poles]]
label = "a"
position = [1.0, 0.0]
mu = [-1.0, 0.0]

[[poles]]
label = "b"
position = [-1.0, 0.0]
mu = [-1.0, 0.0]

[integrator]
t_end = 2.0
"#,
    )
    .unwrap();
    let out = poleflow(
        &["run", file.to_str().unwrap(), "--tol", "1e-10"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let events = read_events_json(&read(dir.path(), "sinks.events.json")).unwrap();
    assert_eq!(events.last().unwrap().kind, poleflow::EventKind::Collision);
    for bad in ["--tol=-1", "--tol=abc"] {
        let out = poleflow(&["run", file.to_str().unwrap(), bad], dir.path());
        assert_eq!(out.status.code(), Some(1));
    }
}

#[test]
fn verify_reports_failures_through_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let ok = poleflow(
        &["verify", "snell", "--theta-deg", "10,30,60", "--s2", "2"],
        dir.path(),
    );
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    assert!(read(dir.path(), "verify-snell.csv").starts_with("law,theta1_deg,s1,s2,"));
    // the critical angle is a skid, reported but not failed
    let skid = poleflow(
        &[
            "verify",
            "snell",
            "--theta-deg",
            "30",
            "--s1",
            "2",
            "--s2",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(skid.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&skid.stdout).contains("skid"));
    let leap = poleflow(&["verify", "leapfrog"], dir.path());
    assert_eq!(leap.status.code(), Some(0));
    let rainbow = poleflow(&["verify", "rainbow", "--distance", "0.7,1"], dir.path());
    assert_eq!(rainbow.status.code(), Some(0));
    let strict = poleflow(
        &[
            "verify",
            "reflection",
            "--theta-deg",
            "45",
            "--max-error",
            "1e-20",
        ],
        dir.path(),
    );
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn amplitude_scan_and_caustic_write_their_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = poleflow(&["amplitude-scan", "--points", "9"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = read(dir.path(), "trough.amplitude.csv");
    assert_eq!(csv.lines().count(), 1 + 18);
    assert!(csv
        .lines()
        .any(|l| l.contains(",0.5,") && l.ends_with("true")));
    assert!(read(dir.path(), "trough.amplitude.svg").contains("Im z = 0.5"));

    let out = poleflow(&["caustic", "--count", "8"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(read(dir.path(), "caustic-arc.svg").contains("stroke-dasharray"));
    assert!(read(dir.path(), "caustic-arc.envelope.csv").starts_with("x,y\n"));
    assert!(read(dir.path(), "caustic-arc-007.trajectory.csv").starts_with("t,x1,y1,x2,y2\n"));
    let summary: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "caustic-arc.caustic.json")).unwrap();
    assert_eq!(summary.as_array().unwrap().len(), 8);
    let out = poleflow(&["caustic", "--count", "1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn presets_are_listed_and_exported_as_editable_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = poleflow(&["presets", "--export"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let listing = String::from_utf8_lossy(&out.stdout);
    for name in poleflow::scenario::preset_names() {
        assert!(listing.contains(name));
        assert!(dir.path().join(format!("{name}.toml")).exists());
    }
    let custom = dir.path().join("snell-step.toml");
    let text = fs::read_to_string(&custom)
        .unwrap()
        .replace("heading_deg = 60.0", "heading_deg = 45.0");
    fs::write(&custom, text).unwrap();
    let out = poleflow(
        &["run", custom.to_str().unwrap(), "--format", "json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
}
