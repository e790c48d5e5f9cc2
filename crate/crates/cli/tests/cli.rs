use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use harmonic_chain::equilibria::closed_form;
use harmonic_chain::ScenarioSpec;
use harmonic_chain::chain_model::Forcing;
use serde_json::Value;

fn hchain(args: &[&str]) -> Output {
    hchain_env(args, None)
}

fn hchain_env(args: &[&str], output_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hchain"));
    cmd.args(args).env_remove("HCHAIN_OUTPUT_DIR");
    if let Some(dir) = output_dir {
        cmd.env("HCHAIN_OUTPUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

const FIXED_RIGHT: [&str; 15] = [
    "equilibrium", "--variant", "fixed-right", "--n", "2", "--L", "2", "--a", "1", "--omega0", "1", "--omega1", "1",
    "--f", "1",
];

#[test]
fn fixed_right_example_csv() {
    let (header, rows) = csv_rows(&stdout(&hchain(&FIXED_RIGHT)));
    assert_eq!(header, ["index", "coordinate", "regime"]);
    let x: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    let expected = [2.0 / 3.0, 4.0 / 3.0, 2.0];
    for (a, b) in x.iter().zip(expected) {
        assert!((a - b).abs() < 1e-14, "{x:?}");
    }
    assert!(rows.iter().all(|r| r[2] == "Increasing"));
}

#[test]
fn limits_example_json() {
    let doc = json(&stdout(&hchain(&["limits", "--omega1", "1", "--omega", "3", "--c", "1", "--format", "json"])));
    assert_eq!(doc["schema_version"], 1);
    let get = |k: &str| doc[k].as_f64().unwrap();
    assert!((get("I") + 1.2768).abs() < 1e-4);
    assert!((get("K") - 0.0413).abs() < 1e-4);
    assert!((get("U_last") - 0.1842).abs() < 1e-4);
    assert!(get("modal_kinetic_last") > 0.0);
}

#[test]
fn circle_without_equilibrium_exits_3() {
    let out = hchain(&["equilibrium", "--variant", "circle", "--n", "3", "--L", "10", "--omega", "1", "--f", "12"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("no-equilibrium"));
    assert!(out.stdout.is_empty());
}

#[test]
fn resonant_drive_exits_3() {
    let out = hchain(&["energy", "--n", "4", "--omega1", "1", "--omega", "1", "--c", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("resonance"));
}

#[test]
fn validation_failures_exit_2() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["frobnicate"],
        vec![],
        vec!["equilibrium", "--variant", "circle", "--L", "1", "--omega", "1"],
        vec!["spectrum", "--n", "0", "--omega1", "1"],
        vec!["equilibrium", "--variant", "spring-ends", "--n", "3", "--L", "1", "--omega0", "0", "--omega1", "1"],
        vec!["dynamics", "--variant", "fixed-right", "--n", "3", "--L", "3", "--omega1", "50", "--dt", "0.5"],
        vec!["sweep", "--sweep-param", "variant", "--sweep-grid", "1"],
        vec!["sweep", "--sweep-param", "f", "--sweep-grid", "1:2"],
    ];
    for args in cases {
        let out = hchain(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).contains("error"), "{args:?}");
    }
}

#[test]
fn missing_parameter_is_named() {
    let out = hchain(&["limits", "--omega1", "1", "--c", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error[config]: missing parameter --omega"));
}

#[test]
fn malformed_and_unknown_config_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ \"n\": 3,").unwrap();
    let unknown = dir.path().join("unknown.json");
    fs::write(&unknown, r#"{"command": "spectrum", "n": 3, "omega1": 1, "colour": "red"}"#).unwrap();
    let wrong_type = dir.path().join("wrong.json");
    fs::write(&wrong_type, r#"{"command": "spectrum", "n": "three", "omega1": 1}"#).unwrap();
    for path in [&bad, &unknown, &wrong_type, &dir.path().join("absent.json")] {
        let out = hchain(&["--config", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2));
        assert!(stderr(&out).contains("error[config]"), "{}", stderr(&out));
    }
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.csv");
    let mut args = FIXED_RIGHT.to_vec();
    args.extend(["--output", target.to_str().unwrap()]);
    let out = hchain(&args);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error[io]"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"command": "equilibrium", "variant": "fixed-right", "n": 2, "L": 2, "a": 1,
            "omega0": 1, "omega1": 1, "f": 5, "format": "json"}"#,
    )
    .unwrap();
    let from_file = json(&stdout(&hchain(&["--config", cfg.to_str().unwrap()])));
    assert_eq!(from_file["regime"], "Clamped");
    let overridden = json(&stdout(&hchain(&["--config", cfg.to_str().unwrap(), "--f", "1"])));
    assert_eq!(overridden["regime"], "Increasing");
    let direct = json(&stdout(&hchain(&[&FIXED_RIGHT[..], &["--format", "json"]].concat())));
    assert_eq!(overridden, direct);
}

#[test]
fn json_round_trip_is_bit_exact() {
    let doc = json(&stdout(&hchain(&[&FIXED_RIGHT[..], &["--format", "json"]].concat())));
    let spec = ScenarioSpec::fixed_right_end(2, 2.0, 1.0, 1.0, 1.0, Forcing::PointOnFirst(1.0));
    let coords = closed_form(&spec).unwrap().config.coords();
    let emitted: Vec<f64> = doc["configuration"].as_array().unwrap().iter().map(|r| r["coordinate"].as_f64().unwrap()).collect();
    assert_eq!(emitted.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), coords.iter().map(|x| x.to_bits()).collect::<Vec<_>>());

    let (_, rows) = csv_rows(&stdout(&hchain(&FIXED_RIGHT)));
    let from_csv: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(from_csv.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), emitted.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
}

#[test]
fn energy_values_round_trip_exactly() {
    let args = ["energy", "--n", "5", "--omega1", "1", "--omega", "3", "--c", "0.7"];
    let (header, rows) = csv_rows(&stdout(&hchain(&args)));
    assert_eq!(header, ["j", "mean_kinetic", "mean_potential"]);
    let doc = json(&stdout(&hchain(&[&args[..], &["--format", "json"]].concat())));
    let table = doc["energies"].as_array().unwrap();
    assert_eq!(table.len(), rows.len());
    for (row, rec) in rows.iter().zip(table) {
        for (i, key) in ["mean_kinetic", "mean_potential"].iter().enumerate() {
            let a: f64 = row[i + 1].parse().unwrap();
            assert_eq!(a.to_bits(), rec[*key].as_f64().unwrap().to_bits());
        }
    }
}

#[test]
fn empty_sweep_is_header_only() {
    for grid in ["--sweep-grid=", "--sweep-grid=0:1:0"] {
        let out = stdout(&hchain(&["sweep", "--variant", "circle", "--n", "3", "--L", "10", "--omega", "1", "--sweep-param", "f", grid]));
        assert_eq!(out, "grid_index,f,status,regime,x_first,x_last,min_gap,energy\n");
    }
}

#[test]
fn sweep_over_force_reports_regime_per_point() {
    let args = ["sweep", "--variant", "circle", "--n", "3", "--L", "10", "--omega", "1", "--sweep-param", "f", "--sweep-grid=-12:12:9"];
    let (header, rows) = csv_rows(&stdout(&hchain(&args)));
    assert_eq!(&header[..4], ["grid_index", "f", "status", "regime"]);
    assert_eq!(rows.len(), 9);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], i.to_string());
        let f: f64 = row[1].parse().unwrap();
        let expected = if f.abs() >= 10.0 { "NoEquilibrium" } else { "Increasing" };
        assert_eq!(row[3], expected, "f = {f}");
    }
}

#[test]
fn sweep_records_point_failures() {
    let args = ["sweep", "--sweep-command", "limits", "--omega1", "1", "--c", "1", "--sweep-param", "omega", "--sweep-grid", "1,3"];
    let (_, rows) = csv_rows(&stdout(&hchain(&args)));
    assert_eq!(rows[0][2], "domain");
    assert!(rows[0][3].is_empty());
    assert_eq!(rows[1][2], "ok");
    assert!((rows[1][3].parse::<f64>().unwrap() + 1.2768).abs() < 1e-4);
}

#[test]
fn default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = hchain_env(&FIXED_RIGHT, Some(dir.path()));
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = fs::read_to_string(dir.path().join("equilibrium.csv")).unwrap();
    assert!(written.starts_with("index,coordinate,regime\n"));

    let explicit = dir.path().join("custom.json");
    let args = [&FIXED_RIGHT[..], &["--format", "json", "--output", explicit.to_str().unwrap()]].concat();
    assert!(hchain_env(&args, Some(dir.path())).status.success());
    assert_eq!(json(&fs::read_to_string(&explicit).unwrap())["schema_version"], 1);
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, name: &str| {
        let path = dir.path().join(name);
        let args = [
            "sweep", "--sweep-command", "dynamics", "--variant", "fixed-right", "--n", "4", "--L", "4", "--omega1", "1",
            "--f", "0.3", "--noise", "0.1", "--t-end", "20", "--sweep-param", "alpha", "--sweep-grid", "0.2:2:8",
            "--seed", seed, "--output", path.to_str().unwrap(),
        ];
        assert!(hchain(&args).status.success());
        fs::read(path).unwrap()
    };
    let first = run("11", "a.csv");
    assert_eq!(first, run("11", "b.csv"));
    assert_ne!(first, run("12", "c.csv"));

    let traj = |seed: &str| {
        stdout(&hchain(&[
            "dynamics", "--variant", "fixed-right", "--n", "3", "--L", "3", "--omega1", "1", "--noise", "0.2", "--seed", seed,
            "--t-end", "5",
        ]))
    };
    assert_eq!(traj("3"), traj("3"));
    assert!(traj("3").starts_with("t,index,q,p\n"));
}

#[test]
fn dynamics_relaxes_to_equilibrium() {
    let doc = json(&stdout(&hchain(&[
        "dynamics", "--variant", "spring-ends", "--n", "4", "--L", "2", "--omega0", "1", "--omega1", "1", "--f", "0.4",
        "--noise", "0.1", "--t-end", "500", "--stride", "100000", "--format", "json",
    ])));
    assert_eq!(doc["converged"], true);
    assert!(doc["max_deviation"].as_f64().unwrap() < 1e-6);
    assert!(doc["final_energy"].as_f64().unwrap() <= doc["initial_energy"].as_f64().unwrap());
}

#[test]
fn flow_reaches_stationary_velocity() {
    let doc = json(&stdout(&hchain(&[
        "flow", "--n", "4", "--L", "4", "--omega", "1", "--f", "1", "--alpha", "0.5", "--format", "json",
    ])));
    let target = doc["target_velocity"].as_f64().unwrap();
    assert!((target - 0.5).abs() < 1e-12);
    assert!(doc["max_velocity_deviation"].as_f64().unwrap() < 1e-8);
    assert_eq!(doc["gaps"].as_array().unwrap().len(), 4);
}

#[test]
fn spectrum_and_continuum_tables() {
    let (header, rows) = csv_rows(&stdout(&hchain(&["spectrum", "--n", "6", "--omega1", "1"])));
    assert_eq!(header, ["k", "nu", "lambda", "proj_last"]);
    assert_eq!(rows.len(), 6);
    let (header, rows) = csv_rows(&stdout(&hchain(&["continuum", "--f1", "1", "--w1", "4", "--n", "200", "--probes", "0.1,0.9"])));
    assert_eq!(header[0], "x");
    assert_eq!(rows.len(), 2);
    let out = hchain(&["continuum", "--f1", "5", "--w1", "4", "--n", "200"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("inadmissible"));
}
