use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn unitom(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unitom")).current_dir(dir).args(args).output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn gen_observables_writes_six_for_two_qubits() {
    let tmp = tempfile::tempdir().unwrap();
    let out = unitom(tmp.path(), &["gen-observables", "--d", "2", "--q", "1", "--question", "among_rank_q", "--seed", "7", "--out", "obs.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read(tmp.path(), "obs.json");
    assert_eq!(v["count"], 6);
    assert_eq!(v["observables"].as_array().unwrap().len(), 6);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["seed"], 7);
}

#[test]
fn identical_argv_gives_identical_bytes_for_any_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let base = ["experiment", "--d", "2", "--q", "1", "--question", "among_rank_q", "--trials", "30", "--seed", "3"];
    let mut outputs = Vec::new();
    for (threads, name) in [("1", "a.json"), ("4", "b.json"), ("4", "c.json")] {
        let mut args = base.to_vec();
        args.extend(["--threads", threads, "--out", name]);
        assert_eq!(unitom(dir, &args).status.code(), Some(0));
        outputs.push(std::fs::read(dir.join(name)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
    let v: Value = serde_json::from_slice(&outputs[0]).unwrap();
    assert_eq!(v["success_rate"].as_f64(), Some(1.0));
    assert_eq!(v["config"]["trials"], 30);

    for name in ["x.json", "y.json"] {
        let args = ["gen-subspace", "--kind", "Vqp", "--d", "3", "--q", "1", "--seed", "9", "--out", name];
        assert_eq!(unitom(dir, &args).status.code(), Some(0));
    }
    assert_eq!(std::fs::read(dir.join("x.json")).unwrap(), std::fs::read(dir.join("y.json")).unwrap());
}

#[test]
fn corrupted_basis_fails_verification() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let gen = unitom(dir, &["gen-subspace", "--kind", "V2q", "--d", "3", "--q", "1", "--seed", "2", "--out", "basis.json"]);
    assert_eq!(gen.status.code(), Some(0));
    let ok = unitom(dir, &["verify-subspace", "--in", "basis.json", "--trials", "200", "--seed", "1"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    let mut v = read(dir, "basis.json");
    let elements = v["elements"].as_array_mut().unwrap();
    let first = elements[0].clone();
    elements[1] = first;
    std::fs::write(dir.join("bad.json"), serde_json::to_string(&v).unwrap()).unwrap();
    let bad = unitom(dir, &["verify-subspace", "--in", "bad.json", "--trials", "1000", "--seed", "1", "--out", "rep.json"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("FAIL"));
    let rep = read(dir, "rep.json");
    assert_eq!(rep["report"]["pass"], false);
}

#[test]
fn usage_and_schema_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(unitom(dir, &["gen-observables", "--d", "2"]).status.code(), Some(2));
    assert_eq!(unitom(dir, &["no-such-command"]).status.code(), Some(2));
    assert_eq!(unitom(dir, &["gen-subspace", "--kind", "V9", "--d", "2", "--seed", "1"]).status.code(), Some(2));
    let missing = unitom(dir, &["verify-subspace", "--in", "missing.json", "--seed", "1"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing.json"));

    std::fs::write(dir.join("broken.json"), r#"{"kind": "V2q", "d": 2, "q": 1, "claimed_dim": 1, "seed": 0, "elements": [{"rows": 4}]}"#).unwrap();
    let broken = unitom(dir, &["verify-subspace", "--in", "broken.json", "--seed", "1"]);
    assert_eq!(broken.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&broken.stderr).contains("$.elements[0].cols"));
}

#[test]
fn measure_then_reconstruct_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let run = |args: &[&str]| {
        let o = unitom(dir, args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    };
    run(&["gen-observables", "--d", "3", "--question", "among_rank_q", "--seed", "7", "--out", "obs.json"]);
    run(&["measure", "--in", "obs.json", "--channel", "haar:12", "--out", "m.json"]);
    run(&["reconstruct", "--in", "obs.json", "--target", "m.json", "--truth", "haar:12", "--restarts", "40", "--seed", "1", "--out", "r.json"]);
    let r = read(dir, "r.json");
    assert!(r["fidelity_to_truth"].as_f64().unwrap() >= 1.0 - 1e-6);
    run(&["discriminate", "--in", "obs.json", "--channel", "haar:12", "--against", "haar:13", "--out", "disc.json"]);
    assert_eq!(read(dir, "disc.json")["distinguished"], true);
    run(&["discriminate", "--in", "obs.json", "--channel", "haar:12", "--against", "haar:12", "--out", "same.json"]);
    assert_eq!(read(dir, "same.json")["distinguished"], false);
    run(&["measure", "--in", "obs.json", "--channel", "random:2:5", "--shots", "1000", "--seed", "4", "--out", "s.json"]);
    assert_eq!(read(dir, "s.json")["mode"]["shots"], 1000);
}

#[test]
fn tns_and_experiment_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let o = unitom(dir, &["gen-tns", "--kind", "both_tr0", "--d", "3", "--seed", "4", "--out", "t.json"]);
    assert_eq!(o.status.code(), Some(0));
    let t = read(dir, "t.json");
    assert_eq!(t["matrix"]["rows"], 9);
    assert_eq!(t["certificate"]["violation_count"], 0);
    assert_eq!(t["certificate"]["exhaustive"], true);

    std::fs::write(dir.join("cfg.json"), r#"{"d": 2, "q": 1, "question": "among_rank_q", "trials": 5, "shots": null, "seed": 3, "task": "reconstruct"}"#).unwrap();
    let o = unitom(dir, &["experiment", "--in", "cfg.json", "--out", "rep.json", "--csv", "rep.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = read(dir, "rep.json");
    assert_eq!(rep["config"]["task"], "reconstruct");
    assert_eq!(rep["records"].as_array().unwrap().len(), 5);
    assert!(rep.get("wall_clock_seconds").is_none());
    let csv = std::fs::read_to_string(dir.join("rep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn clifford_set_is_available() {
    let tmp = tempfile::tempdir().unwrap();
    let o = unitom(tmp.path(), &["gen-observables", "--clifford", "--out", "c.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read(tmp.path(), "c.json")["count"], 6);
}
