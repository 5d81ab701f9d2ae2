use std::path::Path;
use std::process::{Command, Output};

fn gicb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gicb"))
        .args(args)
        .env("GICB_THREADS", "1")
        .output()
        .expect("binary runs")
}

const ASYM_WEAK: [&str; 8] = ["--p1", "10", "--p2", "20", "--h12", "0.2", "--h21", "0.3"];

fn write_channel(dir: &Path, body: &str) -> String {
    let p = dir.join("channel.json");
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn bounds_asym_weak_reports_regime_and_sum_capacity() {
    let mut args = vec!["bounds"];
    args.extend(ASYM_WEAK);
    let out = gicb(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["regime"], true);
    assert_eq!(v["sum_capacity"]["established"], true);
    let sum = v["sum_capacity"]["inner"]["value"].as_f64().unwrap();
    assert!((sum - 3.1198).abs() < 1e-4);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert!(v["tolerances"]["min_slack"].is_number());
    assert_eq!(v["etw_constraints"].as_array().unwrap().len(), 7);
}

#[test]
fn bounds_sym_moderate_from_file_is_not_established() {
    let dir = tempfile::tempdir().unwrap();
    let h = 0.2_f64.sqrt();
    let path = write_channel(
        dir.path(),
        &format!(r#"{{"M": 2, "H": [[1, {h}], [{h}, 1]], "P": [7, 7]}}"#),
    );
    let out = gicb(&["bounds", "--channel", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["regime"], false);
    let inner = v["sum_capacity"]["inner"]["value"].as_f64().unwrap();
    let outer = v["sum_capacity"]["outer"]["value"].as_f64().unwrap();
    assert!(inner < outer);
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(gicb(&["bounds", "--channel", "/nonexistent/ch.json"]).status.code(), Some(2));
    assert_eq!(gicb(&["bounds", "--p1", "1"]).status.code(), Some(2));
    assert_eq!(gicb(&["threshold-sweep", "--snr-db-range", "10:0:1"]).status.code(), Some(2));
    assert_eq!(gicb(&["verify", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(gicb(&["verify", "--inject-fault", "nope"]).status.code(), Some(2));
    assert_eq!(gicb(&["no-such-command"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = write_channel(dir.path(), "{ not json");
    let out = gicb(&["bounds", "--channel", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed"));
}

#[test]
fn strong_interference_exits_3() {
    let out = gicb(&["bounds", "--p1", "10", "--p2", "10", "--h12", "1.5", "--h21", "0.3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strong interference"));
}

#[test]
fn region_csv_header_rows_and_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("region.csv");
    let mut args = vec!["region", "--out", file.to_str().unwrap()];
    args.extend(ASYM_WEAK);
    let out = gicb(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&file).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "R1,R2_tin_corner,R2_hk,R2_etw,R2_bc,R2_epi");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 512);
    for r in &rows {
        if r[2].is_finite() {
            assert!(r[2] <= r[5] + 1e-9);
        }
    }
}

#[test]
fn threshold_sweep_has_13_rows_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for f in [&a, &b] {
        let out = gicb(&["threshold-sweep", "--snr-db-range", "0:60:5", "--out", f.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "snr_db,inr_total_db_vector_genie,inr_db_two_user");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 13);
    assert!(rows.windows(2).all(|w| w[1][2] > w[0][2]), "two-user column is monotone");
}

#[test]
fn two_user_sweep_json_carries_version() {
    let out = gicb(&["threshold-sweep", "--mode", "two-user", "--snr-db-range", "40:80:10", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["columns"]["snr_db"].as_array().unwrap().len(), 5);
    assert!(v["columns"].get("inr_total_db_vector_genie").is_none());
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn network_bounds_many_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_channel(
        dir.path(),
        r#"{"M": 3, "H": [[1, 0.6, 0.6], [0, 1, 0], [0, 0, 1]], "P": [1, 1, 1]}"#,
    );
    let out = gicb(&["network-bounds", "--channel", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["class"], "many-to-one");
    assert_eq!(v["sum_capacity"]["established"], true);
    let tin = v["tin_sum_rate"].as_f64().unwrap();
    assert_eq!(v["sum_capacity"]["inner"].as_f64().unwrap(), tin);
    assert_eq!(v["vector_genie"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_passes_by_default_and_with_loose_tolerance() {
    for extra in [&[][..], &["--tol", "1e-6"][..]] {
        let mut args = vec!["verify"];
        args.extend(extra);
        let out = gicb(&args);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["passed"], true);
    }
}

#[test]
fn verify_names_the_broken_property() {
    let out = gicb(&["verify", "--inject-fault", "chain-rule"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["failures"], serde_json::json!(["chain-rule"]));
    assert!(String::from_utf8_lossy(&out.stderr).contains("chain-rule"));
}
