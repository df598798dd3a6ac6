use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibdens")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    serde_json::from_str(&stdout(&full)).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn dens_report() {
    let text = stdout(&["dens", "7"]);
    assert!(text.contains("dens     41/56"));
    let v = json(&["dens", "7"]);
    assert_eq!(v["dens"]["num"], "41");
    assert_eq!(v["dens"]["den"], "56");
    assert_eq!((v["N"].as_u64(), v["Z"].as_u64(), v["e"].as_u64()), (Some(5), Some(2), Some(1)));
    assert_eq!(v["lucas_zeros"]["zeros"], serde_json::json!([4, 12]));
    let v = json(&["--float", "dens", "2"]);
    assert_eq!(v["dens"]["float"], "0.65625");
    assert_eq!(v["special_case"], "p=2");
}

#[test]
fn text_and_json_agree() {
    let text = stdout(&["table", "--upto", "20"]);
    let v = json(&["table", "--upto", "20"]);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), text.lines().count());
    for (line, r) in text.lines().zip(records) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(fields[0], r["p"].as_u64().unwrap().to_string());
        let (num, den) = (r["dens"]["num"].as_str().unwrap(), r["dens"]["den"].as_str().unwrap());
        let expected = if den == "1" { num.to_string() } else { format!("{num}/{den}") };
        assert_eq!(fields[1], expected);
    }
}

#[test]
fn verify_and_digits() {
    assert_eq!(stdout(&["verify", "19", "--level", "3"]).trim(), "EQUAL, density 3981/6859");
    assert_eq!(stdout(&["digits", "7", "4", "--depth", "8"]).trim(), "3 0 3 4 3 6 4 1");
    let v = json(&["digits", "7", "12", "--depth", "8"]);
    assert_eq!(v["digits"], serde_json::json!([4, 6, 3, 2, 3, 0, 2, 5]));
    assert!(v["sqrt5_digits"].is_null());
}

#[test]
fn interpolation_agrees() {
    for args in [["interp", "7", "40", "--prec", "6"], ["interp", "2", "77", "--prec", "8"], ["interp", "13", "500", "--prec", "4"]] {
        assert!(stdout(&args).contains("agree        yes"), "{args:?}");
    }
    assert_eq!(code(&["interp", "5", "3"]), 1);
}

#[test]
fn tree_outputs() {
    let v = json(&["tree", "7", "--level", "3"]);
    assert_eq!(v["cylinders"], serde_json::json!(["0", "1", "2", "5", "6"]));
    let dot = stdout(&["tree", "7", "--level", "3", "--dot"]);
    assert!(dot.starts_with("digraph attained {") && dot.contains("\"root\" -> \"3\""));
    let brute = json(&["tree", "2", "--level", "3"]);
    assert_eq!(brute["residues"], serde_json::json!(["0", "1", "2", "3", "5", "7"]));
    assert!(stdout(&["tree", "11", "--level", "2", "--brute"]).contains("count"));
    assert_eq!(code(&["tree", "7", "--level", "2", "--fast", "--brute"]), 1);
}

#[test]
fn square_calibration() {
    let text = stdout(&["square-cal", "7", "--level", "3"]);
    assert!(text.contains("151/343") && text.contains("limit 7/16"));
    assert_eq!(json(&["square-cal", "3", "--level", "4"])["ok"], true);
}

#[test]
fn scan_writes_and_resumes() {
    let dir = TempDir::new().unwrap();
    let full = dir.path().join("full.csv");
    let out = run(&["scan", "2", "500", "--out", full.to_str().unwrap(), "--every", "7"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("95 primes"));

    let part = dir.path().join("part.csv");
    let cp = dir.path().join("cp.json");
    stdout(&["scan", "2", "500", "--out", part.to_str().unwrap(), "--every", "7", "--checkpoint", cp.to_str().unwrap()]);
    // a crash can leave uncommitted bytes after the checkpointed position
    let bytes = fs::read(&part).unwrap();
    let mut checkpoint: Value = serde_json::from_slice(&fs::read(&cp).unwrap()).unwrap();
    assert_eq!(checkpoint["sink_position"].as_u64().unwrap(), bytes.len() as u64);
    fs::write(&part, [&bytes[..], b"503,1,2"].concat()).unwrap();
    stdout(&["scan", "2", "500", "--out", part.to_str().unwrap(), "--resume", cp.to_str().unwrap()]);
    assert_eq!(fs::read(&part).unwrap(), fs::read(&full).unwrap());

    // losing committed output is an error, not a silent restart
    fs::write(&part, &bytes[..bytes.len() / 2]).unwrap();
    assert_eq!(code(&["scan", "2", "500", "--out", part.to_str().unwrap(), "--resume", cp.to_str().unwrap()]), 1);

    // a checkpoint from another range is refused
    checkpoint["hi"] = 600.into();
    fs::write(&cp, checkpoint.to_string()).unwrap();
    assert_eq!(code(&["scan", "2", "500", "--out", part.to_str().unwrap(), "--resume", cp.to_str().unwrap()]), 1);
}

#[test]
fn scan_to_stdout() {
    let csv = stdout(&["scan", "2", "10"]);
    assert_eq!(csv.lines().next().unwrap(), "p,dens_num,dens_den,dens_float,e,N,Z,alpha,pi,ms");
    assert_eq!(csv.lines().count(), 5);
    let jsonl = stdout(&["scan", "2", "10", "--format", "jsonl"]);
    let first: Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    assert_eq!(first["dens"]["num"], "21");
}

#[test]
fn wss_range() {
    assert!(stdout(&["wss", "3", "2000"]).contains("no primes"));
    assert_eq!(json(&["wss", "7", "7"])["hits"], serde_json::json!([]));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["dens"]), 1);
    assert_eq!(code(&["dens", "7", "--unknown"]), 1);
    assert_eq!(code(&["dens", "15"]), 1);
    assert_eq!(code(&["scan", "10", "3"]), 1);
    assert_eq!(code(&["tree", "19", "--level", "8", "--brute"]), 2);
    assert_eq!(code(&["scan", "2", "10", "--out", "/nonexistent/dir/out.csv"]), 2);
    assert_eq!(code(&["--inject-fault", "dens", "7"]), 3);
}
