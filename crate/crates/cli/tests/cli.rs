use std::process::{Command, Output};

use bhq::basis::BasisKind;
use bhq::models::{ModelSpec, OperatorKind};
use bhq::oracle::exact_lowest;

fn bhq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bhq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exact_prints_lowest_mass() {
    let o = bhq(&["exact", "--model", "rn", "--Q", "2", "--basis", "pos"]);
    assert!(o.status.success());
    let want = exact_lowest(&ModelSpec::rn(2.0), BasisKind::Position, 4, OperatorKind::Mass).unwrap();
    assert_eq!(stdout(&o).trim(), format!("{want:.8}"));
}

#[test]
fn exact_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    let o = bhq(&["exact", "--model", "btz", "--J", "1", "--basis", "osc", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let eig = v["scaled_eigenvalues"].as_array().unwrap();
    assert_eq!(eig.len(), 16);
    assert_eq!(v["model"]["J"], 1.0);
    assert_eq!(v["basis"], "osc");
}

#[test]
fn validation_exits_with_two() {
    for args in [
        &["exact", "--model", "rn", "--Q", "2", "--basis", "pos", "--qubits", "3"][..],
        &["exact", "--model", "rn", "--J", "2", "--basis", "pos"],
        &["exact", "--model", "kerr", "--Q", "2", "--basis", "pos"],
        &["exact", "--model", "rnds", "--Q", "2", "--basis", "pos"],
        &["report", "--table", "9"],
        &["thermo", "--model", "rn", "--M", "1.5", "--Q", "2"],
        &["potential", "--model", "rn", "--Q", "1", "--b-min", "-1"],
        &["vqe", "--model", "rn", "--Q", "1", "--basis", "pos", "--restarts", "0"],
    ] {
        let o = bhq(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn thermo_json() {
    let o = bhq(&["thermo", "--model", "rn", "--M", "2", "--Q", "2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["temperature"], 0.0);
    assert!(v["beta"].is_null());
    let o = bhq(&["thermo", "--model", "rn", "--M", "2.5", "--Q", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["entropy"].as_f64().unwrap() - 50.26548).abs() < 1e-5);
}

#[test]
fn vqe_is_byte_identical_for_a_seed() {
    let args = ["vqe", "--model", "rn", "--Q", "2", "--basis", "pos", "--seed", "7"];
    let a = bhq(&args);
    let b = bhq(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["best_theta"].as_array().unwrap().len(), 16);
}

#[test]
fn vqe_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("run.json");
    let svg = dir.path().join("run.svg");
    let o = bhq(&[
        "vqe", "--model", "string2d", "--Q", "1", "--basis", "pos", "--op", "mass",
        "--output", json.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let want = exact_lowest(&ModelSpec::string2d(1.0), BasisKind::Position, 4, OperatorKind::Mass).unwrap();
    let printed: f64 = stdout(&o).trim().parse().unwrap();
    assert!(printed - want < 1e-4 && printed >= want - 1e-8);

    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let history = dir.path().join("run.history.csv");
    assert_eq!(v["history_csv_path"], history.to_str().unwrap());
    let csv = std::fs::read_to_string(&history).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("evaluation_index,objective"));
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(!values.is_empty());
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!((min - v["best_value"].as_f64().unwrap()).abs() <= 1e-12);

    let plot = std::fs::read_to_string(&svg).unwrap();
    assert!(plot.starts_with("<svg") && plot.trim_end().ends_with("</svg>"));
    assert_eq!(plot.matches("<polyline").count(), 1);
}

#[test]
fn vqe_on_constraint() {
    let o = bhq(&["vqe", "--model", "string2d", "--Q", "1", "--basis", "pos", "--op", "absH"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["best_value"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn report_tables() {
    let o = bhq(&["report", "--table", "3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("M with Q=1,") && rows[1].starts_with("M with Q=2,"));

    let o = bhq(&["report", "--table", "7"]);
    let out = stdout(&o);
    let header: Vec<&str> = out.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "paulis").unwrap();
    for line in out.lines().skip(1) {
        // the quoted label holds one comma
        let fields: Vec<&str> = line.splitn(2, "\",").nth(1).unwrap().split(',').collect();
        assert_eq!(fields[col - 1], "72");
        assert!(line.contains("PASS"));
    }
}

#[test]
fn potential_metadata() {
    let o = bhq(&["potential", "--model", "rnds", "--Q", "2", "--lambda", "0.01"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("series,b,value\n"));
    let nariai: f64 = out
        .lines()
        .find(|l| l.starts_with("nariai_mass,"))
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((nariai - 3.535433).abs() < 1e-4);

    let o = bhq(&["potential", "--model", "btz", "--J", "1", "--b-min", "0.1", "--b-max", "2", "--samples", "1901"]);
    let min = stdout(&o)
        .lines()
        .filter(|l| l.starts_with("potential,"))
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!((min - 1.0).abs() < 1e-4);

    let o = bhq(&["potential", "--model", "btz", "--J", "1", "--format", "svg"]);
    assert!(stdout(&o).starts_with("<svg"));
}

#[test]
fn contour_passes_turning_points() {
    let o = bhq(&[
        "contour", "--model", "rn", "--Q", "2", "--M", "2.5",
        "--p-min", "-1", "--p-max", "1", "--p-samples", "3",
        "--b-min", "1", "--b-max", "4", "--b-samples", "4",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("field,0,1,0\n"));
    assert!(out.contains("field,0,4,0\n"));
    assert!(out.contains("extreme_mass,,,2\n"));
    assert_eq!(bhq(&["contour", "--model", "rn", "--Q", "2"]).status.code(), Some(2));
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "model = rn\nQ = 1\nbasis = pos\nseed = 3\n").unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = bhq(&["exact", "--config", c]);
    assert!(from_file.status.success());
    let want = exact_lowest(&ModelSpec::rn(1.0), BasisKind::Position, 4, OperatorKind::Mass).unwrap();
    assert_eq!(stdout(&from_file).trim(), format!("{want:.8}"));

    let overridden = bhq(&["exact", "--config", c, "--Q", "2"]);
    let want = exact_lowest(&ModelSpec::rn(2.0), BasisKind::Position, 4, OperatorKind::Mass).unwrap();
    assert_eq!(stdout(&overridden).trim(), format!("{want:.8}"));

    let v: serde_json::Value = serde_json::from_slice(&bhq(&["vqe", "--config", c]).stdout).unwrap();
    assert_eq!(v["seed"], 3);
}

#[test]
fn pauli_terms_round_trip() {
    let o = bhq(&["pauli", "--model", "btz", "--J", "1", "--basis", "osc"]);
    assert!(o.status.success());
    let terms = bhq::pauli::from_csv(&stdout(&o)).unwrap();
    assert_eq!(terms.len(), 57);
    let o = bhq(&["pauli", "--model", "string2d", "--Q", "1", "--basis", "pos", "--op", "absH", "--sweep"]);
    let out = stdout(&o);
    assert!(out.starts_with("cutoff,terms\n"));
    assert!(out.contains("1e-10,36\n"));
}
