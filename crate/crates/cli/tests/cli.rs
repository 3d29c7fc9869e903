use std::process::{Command, Output};

fn reho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reho"))
        .args(args)
        .env_remove("REHO_QUAD_TOL")
        .output()
        .expect("spawn reho")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn tables_un_re_csv() {
    let text = stdout(&reho(&["tables", "--which", "un-re"]));
    let (header, rows) = csv_rows(&text);
    assert_eq!(
        header.join(","),
        "table,source,quantity,family,m,n,lambda,computed,reference,diff,status"
    );
    assert_eq!(rows.len(), 9);
    let status = column(&header, "status");
    assert!(rows.iter().all(|r| r[status] == "pass"));
    let row = rows.iter().find(|r| r[4] == "2" && r[5] == "-1").unwrap();
    assert_eq!(row[column(&header, "reference")], "5.17200000000e-1");
    let computed: f64 = row[column(&header, "computed")].parse().unwrap();
    assert!((computed - 0.5172).abs() < 2e-3);
}

#[test]
fn tables_appendix_a_single_lambda() {
    let text = stdout(&reho(&["tables", "--which", "appendix-a", "--lambda", "0.1"]));
    let (header, rows) = csv_rows(&text);
    let lambda = column(&header, "lambda");
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r[lambda] == "1.00000000000e-1"));
    let status = column(&header, "status");
    assert!(rows.iter().all(|r| r[status] == "pass"), "{text}");
}

#[test]
fn tables_un_pam_reaches_tenth_level() {
    let text = stdout(&reho(&["tables", "--which", "un-pam"]));
    let (header, rows) = csv_rows(&text);
    let n = column(&header, "n");
    let family = column(&header, "family");
    assert!(rows.iter().any(|r| r[n] == "10" && r[family] == "pursey"));
    assert!(rows.iter().any(|r| r[n] == "10" && r[family] == "am"));
}

#[test]
fn tables_all_writes_directory() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("tables");
    let out = reho(&["tables", "--which", "all", "-o", target.to_str().unwrap()]);
    stdout(&out);
    for name in ["un-re", "un-iso", "un-pam", "appendix-a", "appendix-b"] {
        let file = target.join(format!("{name}.csv"));
        let text = std::fs::read_to_string(&file).unwrap();
        assert!(text.lines().count() > 1, "{name}");
    }
    let iso = std::fs::read_to_string(target.join("un-iso.csv")).unwrap();
    assert_eq!(iso.matches(",flagged").count(), 3);
}

#[test]
fn output_is_deterministic() {
    let a = stdout(&reho(&["tables", "--which", "un-iso"]));
    let b = stdout(&reho(&["tables", "--which", "un-iso"]));
    assert_eq!(a, b);
}

#[test]
fn reho_m0_potential_is_shifted_oscillator() {
    let text = stdout(&reho(&[
        "curves", "--family", "reho", "--m", "0", "--x-min", "-2", "--x-max", "2", "--x-step", "0.5",
    ]));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header.join(","), "quantity,family,m,n,lambda,x,value");
    assert_eq!(rows.len(), 9);
    for r in rows {
        let x: f64 = r[5].parse().unwrap();
        let v: f64 = r[6].parse().unwrap();
        assert!((v - (x * x - 2.0)).abs() < 1e-10, "{x}: {v}");
    }
}

#[test]
fn wide_layout_has_one_column_per_curve() {
    let out = Command::new(env!("CARGO_BIN_EXE_reho"))
        .args([
            "curves", "--family", "iso", "--m", "2", "--lambda", "0.1,1,10", "--layout", "wide",
            "--x-min", "-1", "--x-max", "1", "--x-step", "0.5",
        ])
        .output()
        .unwrap();
    let text = stdout(&out);
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "x,\"potential[iso,m=2,lambda=0.1]\",\"potential[iso,m=2,lambda=1]\",\"potential[iso,m=2,lambda=10]\""
    );
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn uncertainty_sweep_over_m() {
    let text = stdout(&reho(&["curves", "--uncertainty-sweep", "m", "--n", "-1", "--m-max", "10"]));
    let (header, rows) = csv_rows(&text);
    assert_eq!(rows.len(), 6);
    let dx_dp = column(&header, "dx_dp");
    let values: Vec<f64> = rows.iter().map(|r| r[dx_dp].parse().unwrap()).collect();
    assert!((values[0] - 0.5).abs() < 1e-9);
    assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
}

#[test]
fn uncertainty_json() {
    let text = stdout(&reho(&[
        "uncertainty", "--family", "pursey", "--m", "2", "--n", "0", "--format", "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let row = &v[0];
    assert_eq!(row["family"], "pursey");
    assert_eq!(row["energy"], 6.0);
    assert!((row["mean_x"].as_f64().unwrap() - 0.3928).abs() < 2e-3);
}

#[test]
fn uncertainty_pretty() {
    let text = stdout(&reho(&["uncertainty", "--m", "0", "--n", "-1,0", "--format", "pretty"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].contains("dx_dp"));
    assert!(lines[1].trim_start().starts_with('-'));
    assert!(lines[3].contains("1.500000"));
}

#[test]
fn odd_codimension_is_usage_error() {
    let out = reho(&["validate", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn singular_lambda_is_usage_error() {
    let out = reho(&["uncertainty", "--family", "iso", "--m", "2", "--lambda", "-0.5", "--n", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda"));
}

#[test]
fn quad_tolerance_from_environment() {
    let base = stdout(&reho(&["uncertainty", "--m", "2", "--n", "1"]));
    let out = Command::new(env!("CARGO_BIN_EXE_reho"))
        .args(["uncertainty", "--m", "2", "--n", "1"])
        .env("REHO_QUAD_TOL", "1e-6")
        .output()
        .unwrap();
    let loose = stdout(&out);
    let pick = |t: &str| -> f64 { t.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap() };
    assert!((pick(&base) - pick(&loose)).abs() < 1e-5);

    let bad = Command::new(env!("CARGO_BIN_EXE_reho"))
        .args(["uncertainty"])
        .env("REHO_QUAD_TOL", "abc")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn validate_json_lines() {
    let text = stdout(&reho(&["validate", "--m", "0", "--lambda", "0.5", "--levels", "3", "--format", "json"]));
    let mut checks = 0;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["pass"], true, "{line}");
        checks += 1;
    }
    assert!(checks > 10);
}
