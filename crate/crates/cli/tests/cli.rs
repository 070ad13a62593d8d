use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn benchmarks() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oraclekit")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn metrics(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn synth_squar5_widths_per_method() {
    let tmp = TempDir::new().unwrap();
    let pla = benchmarks().join("squar5.pla");
    for (method, qubits) in [("esop", 13), ("tbs", 9), ("esop-rtt", 18)] {
        let qasm = tmp.path().join(format!("{method}.qasm"));
        let json = tmp.path().join(format!("{method}.json"));
        let out = run(&["synth", "--in", s(&pla), "--method", method, "--out", s(&qasm), "--metrics", s(&json)]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let m = metrics(&json);
        assert_eq!(m["qubits"], qubits, "{method}");
        assert_eq!(m["status"], "ok");
        assert_eq!(m["verification"]["passed"], true);
        let text = fs::read_to_string(&qasm).unwrap();
        assert!(text.starts_with(&format!("OPENQASM 3.0;\nqubit[{qubits}] q;\n")));
        assert!(text.contains("// roles (in -> out)\n"));
    }
}

#[test]
fn synth_then_verify_round_trip() {
    let tmp = TempDir::new().unwrap();
    let pla = benchmarks().join("dist.pla");
    for (method, mode) in [("esop", "preserve"), ("tbs", "minimal")] {
        let netlist = tmp.path().join(format!("{method}.json"));
        let qasm = tmp.path().join("c.qasm");
        let out = run(&["synth", "--in", s(&pla), "--method", method, "--out", s(&qasm), "--netlist", s(&netlist)]);
        assert_eq!(code(&out), 0);
        let out = run(&["verify", "--in", s(&pla), "--circuit", s(&netlist), "--mode", mode]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["passed"], true);
        assert_eq!(report["checked"], 256);
    }
}

#[test]
fn verify_rejects_a_damaged_netlist() {
    let tmp = TempDir::new().unwrap();
    let pla = tmp.path().join("and.pla");
    fs::write(&pla, ".i 2\n.o 1\n11 1\n.e\n").unwrap();
    let netlist = tmp.path().join("c.json");
    let qasm = tmp.path().join("c.qasm");
    assert_eq!(
        code(&run(&["synth", "--in", s(&pla), "--method", "esop", "--out", s(&qasm), "--netlist", s(&netlist)])),
        0
    );
    let mut c: serde_json::Value = serde_json::from_str(&fs::read_to_string(&netlist).unwrap()).unwrap();
    c["gates"].as_array_mut().unwrap().pop();
    fs::write(&netlist, c.to_string()).unwrap();
    let out = run(&["verify", "--in", s(&pla), "--circuit", s(&netlist), "--mode", "preserve"]);
    assert_eq!(code(&out), 3);
}

fn histogram(text: &str) -> Vec<(String, u64)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("bitstring,count,probability"));
    lines
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            (cols[0].to_string(), cols[1].parse().unwrap())
        })
        .filter(|(_, count)| *count > 0)
        .collect()
}

#[test]
fn grover_diamonds() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("h.csv");
    let out = run(&[
        "grover",
        "--deck",
        "--query",
        "suit=diamonds,rank=10",
        "--iterations",
        "6",
        "--shots",
        "1024",
        "--seed",
        "7",
        "--out",
        s(&csv),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut h = histogram(&fs::read_to_string(&csv).unwrap());
    h.sort_by_key(|(_, c)| std::cmp::Reverse(*c));
    assert_eq!(h[0].0, "101010");
    assert!(h[0].1 >= 1000, "{h:?}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("predicted success: 0.99"), "{stderr}");
}

#[test]
fn grover_clubs_auto() {
    let out = run(&["grover", "--deck", "--query", "suit=clubs", "--iterations", "auto"]);
    assert_eq!(code(&out), 0);
    let h = histogram(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(h.len(), 16);
    assert!(h.iter().all(|(b, _)| b.starts_with("00")));
    assert_eq!(h.iter().map(|(_, c)| c).sum::<u64>(), 1024);
    assert!(String::from_utf8_lossy(&out.stderr).contains("iterations: 1"));
}

#[test]
fn grover_is_reproducible() {
    let args = ["grover", "--deck", "--query", "rank=ace", "--seed", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn encode_pairs() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("pairs.csv");
    let pla = tmp.path().join("out.pla");
    fs::write(&csv, "domain,range\n0,3\n1,1\n2,0\n").unwrap();
    let out = run(&["encode", "--csv", s(&csv), "--out", s(&pla)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&pla).unwrap();
    assert!(text.contains(".i 2\n"));
    assert!(text.contains(".o 2\n"));
    assert!(text.contains("00 11\n"));
    assert!(text.contains("10 00\n"));
    fs::write(&csv, "0,1\nx,2\n").unwrap();
    assert_eq!(code(&run(&["encode", "--csv", s(&csv), "--out", s(&pla)])), 2);
}

#[test]
fn bench_csv_for_one_method() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("b");
    fs::create_dir(&dir).unwrap();
    fs::copy(benchmarks().join("squar5.pla"), dir.join("squar5.pla")).unwrap();
    fs::copy(benchmarks().join("inc.pla"), dir.join("inc.pla")).unwrap();
    let csv = tmp.path().join("r.csv");
    let out = run(&["bench", "--dir", s(&dir), "--methods", "esop,tbs", "--csv", s(&csv), "--jobs", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "function,inputs,outputs,method,qubits,gate_count,complexity,time_us,status");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("inc,7,9,esop,16,"));
    assert_eq!(lines[2], "inc,7,9,tbs,,,,,too_large");
    assert!(lines[3].starts_with("squar5,5,8,esop,13,"));
    assert!(lines[4].starts_with("squar5,5,8,tbs,9,") && lines[4].ends_with(",ok"));
}

#[test]
fn input_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&run(&["bench", "--dir", s(&tmp.path().join("nope"))])), 2);
    let bad = tmp.path().join("bad.pla");
    fs::write(&bad, ".i 2\n.o 1\n1x 1\n").unwrap();
    let qasm = tmp.path().join("c.qasm");
    let out = run(&["synth", "--in", s(&bad), "--method", "esop", "--out", s(&qasm)]);
    assert_eq!(code(&out), 2);
    assert!(!qasm.exists());
    let out = run(&["synth", "--in", s(&tmp.path().join("missing.pla")), "--method", "tbs", "--out", s(&qasm)]);
    assert_eq!(code(&out), 2);
}

#[test]
fn tbs_gate_limit_exits_4() {
    let tmp = TempDir::new().unwrap();
    let qasm = tmp.path().join("c.qasm");
    let pla = benchmarks().join("mlp4.pla");
    let out = run(&["synth", "--in", s(&pla), "--method", "tbs", "--out", s(&qasm)]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bench_timeout_becomes_a_row() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("b");
    fs::create_dir(&dir).unwrap();
    fs::copy(benchmarks().join("squar5.pla"), dir.join("squar5.pla")).unwrap();
    let out = run(&["bench", "--dir", s(&dir), "--methods", "tbs", "--timeout-s", "0"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().ends_with("squar5,5,8,tbs,,,,,timeout\n"));
}
