use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn qamic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qamic")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_lines(text: &str) -> Vec<String> {
    text.lines().filter(|l| !l.starts_with('#')).map(str::to_owned).collect()
}

#[test]
fn minrank_of_first_example() {
    let out = qamic(&["minrank", fixture("example1.json").to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["minrank"], 4);
    assert_eq!(v["all_decodable"], true);
}

#[test]
fn analyze_is_byte_identical_across_runs() {
    let path = fixture("example1.json");
    let a = qamic(&["analyze", path.to_str().unwrap()]);
    let b = qamic(&["analyze", path.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let etas: Vec<u64> = v["receivers"].as_array().unwrap().iter().map(|r| r["eta"].as_u64().unwrap()).collect();
    assert_eq!(etas, vec![1, 2, 2, 4, 4, 4, 4]);
}

#[test]
fn analyze_without_code_uses_minrank_witness() {
    let out = qamic(&["analyze", fixture("example2.json").to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["code_source"], "minrank witness");
    assert_eq!(v["length"], 3);
}

#[test]
fn distances_for_eight_qam() {
    let out = qamic(&["distances", fixture("example2_l1.json").to_str().unwrap()]);
    assert!(out.status.success());
    let lines = data_lines(&stdout(&out));
    assert_eq!(lines[0], "receiver,eta,dmin_sq,bracket_lo_sq,bracket_hi_sq,spectrum_histogram");
    let dmins: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(dmins, vec!["9.6", "4.8", "2.4", "2.4", "2.4"]);
    assert!(stdout(&out).contains("# problem_hash: "));
}

#[test]
fn formula_table() {
    let out = qamic(&["formula", "--from", "2", "--to", "6"]);
    assert!(out.status.success());
    let lines = data_lines(&stdout(&out));
    assert_eq!(lines.len(), 6);
    assert!(lines.contains(&"4,1.26491,1.6".to_string()));
}

#[test]
fn map_csv_and_json() {
    let path = fixture("example1.json");
    let csv = qamic(&["map", path.to_str().unwrap()]);
    assert!(csv.status.success());
    let lines = data_lines(&stdout(&csv));
    assert_eq!(lines[0], "codeword_bits,point_index,I,Q");
    assert_eq!(lines.len(), 17);

    let json = qamic(&["map", path.to_str().unwrap(), "--format", "json", "--mapping-seed", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["seed"], 3);
    assert_eq!(v["threshold"], 4);
    assert_eq!(v["assignment"].as_array().unwrap().len(), 16);
    assert_eq!(v["problem_hash"].as_str().unwrap().len(), 16);
}

#[test]
fn simulate_writes_results_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("results.csv");
    let out = qamic(&[
        "simulate",
        fixture("example1.json").to_str().unwrap(),
        "--snr-start",
        "4",
        "--snr-stop",
        "8",
        "--snr-step",
        "2",
        "--trials",
        "2000",
        "--seed",
        "7",
        "--scheme",
        "qam-mapped,binary",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    for key in ["# problem_hash: ", "# L: ", "# mapping_hash: ", "# seed: 7", "# energy: "] {
        assert!(text.contains(key), "missing {key}");
    }
    let lines = data_lines(&text);
    assert_eq!(lines[0], "scheme,receiver,snr_db,trials,errors,error_rate,stderr");
    // 2 schemes x 3 SNR points x 7 receivers
    assert_eq!(lines.len(), 1 + 42);
    assert!(lines[1].starts_with("qam-mapped,1,4,2000,"));
    assert!(lines.last().unwrap().starts_with("binary,7,8,2000,"));
}

#[test]
fn invalid_problem_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"n": 2, "receivers": [{"wants": [1], "knows": [1]}]}"#).unwrap();
    let out = qamic(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "parse");
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn missing_file_exits_with_runtime_code() {
    let out = qamic(&["validate", "/nonexistent/problem.json"]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "io");
}

#[test]
fn bad_scheme_is_a_validation_error() {
    let out = qamic(&["simulate", fixture("example1.json").to_str().unwrap(), "--scheme", "qpsk"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_reports_shape() {
    let out = qamic(&["validate", fixture("example2.json").to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["messages"], 5);
    assert_eq!(v["single_unicast"], true);
    assert!(v["encoding"].is_null());
}
