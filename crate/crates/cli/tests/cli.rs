use std::fs;
use std::process::{Command, Output};

fn geomeas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geomeas")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

fn value(text: &str) -> f64 {
    field(text, "value").parse().unwrap()
}

#[test]
fn eval_examples() {
    let out = geomeas(&["eval", "-n", "3", "--fp", "1", "--fm", "0", "-k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!((value(&text) - 0.5).abs() < 1e-9);
    for key in ["method", "mu", "bures", "groverian"] {
        field(&text, key);
    }

    let out = geomeas(&["eval", "-n", "3", "--fp", "0.125", "--fm", "0.125", "-k", "3"]);
    assert!(value(&stdout(&out)).abs() < 1e-12);

    let out = geomeas(&["eval", "-n", "4", "--fp", "0.9", "--fm", "0", "-k", "2"]);
    assert!((value(&stdout(&out)) - 0.2).abs() < 1e-10);
}

#[test]
fn eval_methods_agree() {
    let base = ["eval", "-n", "3", "--fp", "0.6", "--fm", "0.2"];
    let mut values = Vec::new();
    for m in ["auto", "obs1", "obs2", "obs4", "legendre2d"] {
        let mut args = base.to_vec();
        args.extend(["--method", m]);
        let out = geomeas(&args);
        assert_eq!(out.status.code(), Some(0), "{m}");
        values.push(value(&stdout(&out)));
    }
    assert!(values.iter().all(|v| (v - values[0]).abs() < 1e-6), "{values:?}");

    let out = geomeas(&["eval", "--fp", "0.6", "--fm", "0", "--method", "closed"]);
    assert!((value(&stdout(&out)) - cathetus_formula(0.6)).abs() < 1e-12);

    let out = geomeas(&["eval", "--fp", "0.6", "--fm", "0.1", "--method", "oracle", "--restarts", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let formula = value(&stdout(&geomeas(&["eval", "--fp", "0.6", "--fm", "0.1"])));
    assert!(value(&stdout(&out)) >= formula - 1e-9);
}

fn cathetus_formula(f: f64) -> f64 {
    (1.0 + 2.0 * f - 2.0 * (3.0 * f * (1.0 - f)).sqrt()) / 4.0
}

#[test]
fn eval_exit_codes() {
    let code = |args: &[&str]| geomeas(args).status.code();
    assert_eq!(code(&["eval", "--fp", "0.1", "--fm", "0.1", "--method", "obs4"]), Some(3));
    assert_eq!(code(&["eval", "--fp", "0.7", "--fm", "0.4"]), Some(2));
    assert_eq!(code(&["eval", "-n", "3", "--fp", "0.7", "-k", "4"]), Some(2));
    assert_eq!(code(&["eval", "--fp", "0.7", "-k", "2", "--method", "obs1"]), Some(2));
    assert_eq!(code(&["eval", "--fp", "0.6", "--fm", "0.2", "--method", "closed"]), Some(3));
    assert_eq!(code(&["eval", "--bogus"]), Some(2));
}

#[test]
fn help_for_every_subcommand() {
    for sub in ["eval", "contour", "decompose", "compare"] {
        let out = geomeas(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0));
        assert!(stdout(&out).contains("Usage"));
    }
}

#[test]
fn contour_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let out = geomeas(&["contour", "-n", "3", "-k", "3", "-r", "5", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "f_plus,f_minus,k,value");
    assert_eq!(lines.len(), 16);
    let parsed: Vec<(f64, f64)> = lines[1..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    let mut sorted = parsed.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(parsed, sorted);
}

#[test]
fn contour_values_match_eval() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    geomeas(&["contour", "-n", "4", "-k", "2,3,4", "-r", "5", "-o", path.to_str().unwrap()]);
    let text = fs::read_to_string(&path).unwrap();
    let rows: Vec<Vec<String>> =
        text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert_eq!(rows.len(), 45);
    for chunk in rows.chunks(3) {
        let v: Vec<f64> = chunk.iter().map(|r| r[3].parse().unwrap()).collect();
        assert!(v[0] <= v[1] + 1e-9 && v[1] <= v[2] + 1e-9);
    }
    let row = &rows[3 * 10 + 1];
    let out = geomeas(&["eval", "-n", "4", "--fp", &row[0], "--fm", &row[1], "-k", &row[2]]);
    assert_eq!(field(&stdout(&out), "value"), row[3]);
}

#[test]
fn contour_json_uses_strings() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let out = geomeas(&["contour", "-r", "3", "--format", "json", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let recs = doc.as_array().unwrap();
    assert_eq!(recs.len(), 6);
    assert!(recs[0]["value"].is_string());
    assert_eq!(recs[0]["k"], 3);
}

#[test]
fn contour_errors() {
    let out = geomeas(&["contour", "-r", "5", "-o", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(4));
    let out = geomeas(&["contour", "-r", "1", "-o", "/tmp/never.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decompose_examples() {
    let dir = tempfile::tempdir().unwrap();
    for (fp, count) in [("0.5", 28), ("0.875", 29), ("1", 1)] {
        let path = dir.path().join(format!("{fp}.json"));
        let out = geomeas(&["decompose", "--fp", fp, "-o", path.to_str().unwrap(), "--restarts", "5"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        let elements = doc["elements"].as_array().unwrap();
        assert_eq!(elements.len(), count);
        assert_eq!(elements[0]["amplitudes"].as_array().unwrap().len(), 8);
        let residual: f64 = doc["residual"].as_str().unwrap().parse().unwrap();
        assert!(residual < 1e-10);
        let avg: f64 = doc["average_entanglement"].as_str().unwrap().parse().unwrap();
        let formula: f64 = doc["formula"].as_str().unwrap().parse().unwrap();
        assert!((avg - formula).abs() < 1e-6);
    }
    let out = geomeas(&["decompose", "--fp", "0.2", "-o", "/tmp/never.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_examples() {
    let out = geomeas(&["compare", "-n", "3", "-k", "3", "-s", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let dev: f64 = field(&text, "max |formula - legendre2d|").parse().unwrap();
    assert!(dev < 1e-6);

    let out = geomeas(&["compare", "-n", "4", "-s", "100", "--oracle-samples", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(field(&stdout(&out), "monotonicity violations"), "0");

    assert_eq!(geomeas(&["compare", "-s", "0"]).status.code(), Some(2));
}
