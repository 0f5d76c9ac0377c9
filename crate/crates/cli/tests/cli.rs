use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const IDS: [&str; 8] = [
    "fig2_inductance_pulses",
    "fig3_inductance_spectrum",
    "fig4_capacitance_pulses",
    "fig5_area_pulses",
    "fig6_area_spectrum",
    "fig7_asymmetry_pulses",
    "fig8_realistic_spectrum",
    "n_scaling_sweep",
];

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_comb-forge"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("COMB_FORGE_THREADS", t),
        None => cmd.env_remove("COMB_FORGE_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn error_record(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("error line");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("not JSON: {line}: {e}"))
}

#[test]
fn help_lists_every_scenario() {
    for args in [&["--help"][..], &["scenario", "--help"][..]] {
        let out = run(args, None);
        assert!(out.status.success());
        let text = String::from_utf8_lossy(&out.stdout);
        for id in IDS {
            assert!(text.contains(id), "{args:?} help misses {id}");
        }
    }
}

#[test]
fn list_scenarios_prints_ids() {
    let out = run(&["list-scenarios"], None);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let listed: Vec<&str> = text
        .lines()
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(listed, IDS);
}

#[test]
fn unknown_scenario_fails_with_valid_ids() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["scenario", "fig9_missing", "--out", dir.path().to_str().unwrap()],
        None,
    );
    assert!(!out.status.success());
    let rec = error_record(&out);
    assert_eq!(rec["error"], "UnknownScenario");
    let valid: Vec<String> = serde_json::from_value(rec["valid_ids"].clone()).unwrap();
    assert_eq!(valid, IDS);
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_writes_outputs_and_echo() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"{{"steps_per_period": 16384, "k_max": 40, "output_dir": {:?}}}"#,
            out_dir.to_str().unwrap()
        ),
    );
    let out = run(&["simulate", "--config", &cfg, "--set", "n_squids=10"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in [
        "resolved_config.json",
        "waveform.csv",
        "spectrum.csv",
        "pulses.csv",
        "manifest.json",
    ] {
        assert!(out_dir.join(f).exists(), "missing {f}");
    }
    let echo: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("resolved_config.json")).unwrap()).unwrap();
    assert_eq!(echo["config"]["n_squids"], 10);
    assert_eq!(echo["overrides"]["n_squids"]["file"], 50);
    let spectrum = fs::read_to_string(out_dir.join("spectrum.csv")).unwrap();
    assert!(spectrum.starts_with("k,f_Hz,P_W,parity\n"));
    assert_eq!(spectrum.lines().count(), 41);
    let manifest: serde_json::Value = serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn invalid_override_reports_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = run(&["simulate", "--config", &cfg, "--set", "asymmetry=1.5"], None);
    assert!(!out.status.success());
    let rec = error_record(&out);
    assert_eq!(rec["error"], "ValidationError");
    assert!(rec["message"].as_str().unwrap().contains("|r| < 1"));
}

#[test]
fn unknown_config_key_is_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"shunt_resistence_ohm": 20}"#);
    let out = run(&["simulate", "--config", &cfg], None);
    assert!(!out.status.success());
    assert_eq!(error_record(&out)["error"], "ParseError");
}

#[test]
fn bad_thread_count_rejected() {
    let out = run(&["list-scenarios"], Some("zero"));
    assert!(!out.status.success());
    assert_eq!(error_record(&out)["error"], "ValidationError");
}

fn without_runtime(path: &Path) -> serde_json::Value {
    let mut m: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    m.as_object_mut().unwrap().remove("runtime_seconds");
    m
}

#[test]
fn scenario_output_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("one");
    let b = dir.path().join("four");
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let out = run(
            &[
                "scenario",
                "fig5_area_pulses",
                "--out",
                path.to_str().unwrap(),
                "--quick",
                "--seed",
                "11",
            ],
            Some(threads),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let ma = without_runtime(&a.join("manifest.json"));
    assert_eq!(ma, without_runtime(&b.join("manifest.json")));
    assert_eq!(ma["seed"], 11);
    assert_eq!(ma["quick"], true);
    for f in ma["files"].as_array().unwrap() {
        let name = f["path"].as_str().unwrap();
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}
