use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

fn rpdp(cwd: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpdp"))
        .args(args)
        .current_dir(cwd)
        .env_remove("RPDP_SEED")
        .env_remove("RPDP_THREADS")
        .output()
        .unwrap()
}

fn ok(cwd: &Path, args: &[&str]) -> BTreeMap<String, String> {
    let out = rpdp(cwd, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter_map(|l| l.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn gen_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for out in ["a.txt", "b.txt"] {
        ok(d, &["gen", "sbm", "--blocks", "40,40", "--p-in", "0.3", "--p-out", "0.02", "--seed", "5", "--out", out]);
    }
    assert_eq!(std::fs::read(d.join("a.txt")).unwrap(), std::fs::read(d.join("b.txt")).unwrap());
    assert_eq!(
        std::fs::read(d.join("a.txt.labels.csv")).unwrap(),
        std::fs::read(d.join("b.txt.labels.csv")).unwrap()
    );
    let kv = ok(d, &["gen", "ba", "--n", "500", "--links", "2", "--seed", "1", "--out", "ba.txt"]);
    assert_eq!(kv["nodes"], "500");
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "er", "--n", "80", "--p", "0.1", "--seed", "9", "--out", "flag.txt"]);
    let out = Command::new(env!("CARGO_BIN_EXE_rpdp"))
        .args(["gen", "er", "--n", "80", "--p", "0.1", "--out", "env.txt"])
        .current_dir(d)
        .env("RPDP_SEED", "9")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(std::fs::read(d.join("flag.txt")).unwrap(), std::fs::read(d.join("env.txt")).unwrap());
}

#[test]
fn calibrated_publish_reports_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "ba", "--n", "2000", "--links", "3", "--seed", "2", "--out", "g.txt"]);
    let kv = ok(d, &["publish", "g.txt", "--m", "64", "--epsilon", "1", "--delta", "0.01", "--out", "p.bin"]);
    assert_eq!(kv["status"], "calibrated");
    let sigma: f64 = kv["sigma"].parse().unwrap();
    assert_eq!(sigma, rpdp::calibrate_sigma(1.0, 0.01, 2000).unwrap());
    assert_eq!(kv["n"], "2000");

    let kv = ok(d, &["publish", "g.txt", "--m", "8", "--sigma", "0", "--out", "z.bin"]);
    assert_eq!(kv["status"], "uncalibrated");
    assert!(!kv.contains_key("epsilon"));
}

#[test]
fn bad_arguments_fail_with_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "k4.txt", "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    let too_wide = rpdp(d, &["publish", "k4.txt", "--m", "4", "--sigma", "1", "--out", "p.bin"]);
    assert_eq!(too_wide.status.code(), Some(1));
    assert!(!d.join("p.bin").exists());

    let both = rpdp(d, &["publish", "k4.txt", "--m", "2", "--sigma", "1", "--epsilon", "1", "--delta", "0.1", "--out", "p.bin"]);
    assert_eq!(both.status.code(), Some(2));

    ok(d, &["publish", "k4.txt", "--m", "2", "--sigma", "0.1", "--out", "p.bin"]);
    let wide_k = rpdp(d, &["eigen", "p.bin", "--k", "3", "--out", "e.bin"]);
    assert_ne!(wide_k.status.code(), Some(0));

    write(d, "bad.txt", "0 1\n1 x\n");
    let parse = rpdp(d, &["eigen", "bad.txt", "--k", "1", "--out", "e.bin"]);
    assert_eq!(parse.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("line 2"));
}

#[test]
fn small_graph_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "k4.txt", "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    let kv = ok(d, &["eigen", "k4.txt", "--k", "1", "--out", "e.bin", "--csv", "e.csv"]);
    assert!((kv["value_1"].parse::<f64>().unwrap() - 3.0).abs() < 1e-10);
    assert_eq!(kv["source"], "original");

    write(d, "tri.txt", "0 1\n0 2\n1 2\n3 4\n3 5\n4 5\n");
    write(d, "tri.labels.csv", "node_id,cluster\n0,0\n1,0\n2,0\n3,1\n4,1\n5,1\n");
    let kv = ok(d, &["cluster", "tri.txt", "--k", "2", "--planted", "tri.labels.csv", "--out", "c.csv"]);
    assert_eq!(kv["nmi_planted"].parse::<f64>().unwrap(), 1.0);
    assert_eq!(kv["empty_clusters"], "0");

    let kv = ok(d, &["degree-dist", "tri.txt", "--out", "deg.csv"]);
    assert_eq!(kv["nodes"], "6");
    assert_eq!(kv["distinct_degrees"], "1");
}

#[test]
fn pcc_top_t_rows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "sbm", "--blocks", "50,50", "--p-in", "0.3", "--p-out", "0.02", "--seed", "1", "--out", "g.txt"]);
    let kv = ok(d, &["pcc", "g.txt", "--k", "2", "--t", "10", "--rank", "--out", "top.csv"]);
    assert_eq!(kv["rows"], "10");
    let text = std::fs::read_to_string(d.join("top.csv")).unwrap();
    assert_eq!(text.lines().count(), 11);

    ok(d, &["publish", "g.txt", "--m", "20", "--sigma", "0.1", "--out", "p.bin"]);
    let kv = ok(d, &["pcc", "p.bin", "--k", "2", "--graph", "g.txt", "--out", "all.csv"]);
    assert_eq!(kv["rows"], "100");
    assert_eq!(kv["normalized"], "true");
    let no_graph = rpdp(d, &["pcc", "p.bin", "--k", "2", "--out", "x.csv"]);
    assert_eq!(no_graph.status.code(), Some(2));
    ok(d, &["pcc", "p.bin", "--k", "2", "--mode", "self-contained", "--out", "own.csv"]);
}

#[test]
fn evaluate_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "sbm", "--blocks", "40,40", "--p-in", "0.4", "--p-out", "0.02", "--seed", "2", "--out", "g.txt"]);
    let kv = ok(
        d,
        &[
            "evaluate", "g.txt", "--ms", "10,20", "--sigmas", "0,1", "--ks", "2", "--ts", "10", "--lnpp", "1", "--seeds",
            "1,2", "--planted", "g.txt.labels.csv", "--out", "r.csv", "--jsonl", "r.jsonl",
        ],
    );
    // one original row, 2 m × 2 σ × 2 seeds, 2 LNPP seeds
    assert_eq!(kv["reports"], "11");
    assert_eq!(kv["failed_cells"], "0");
    let csv = std::fs::read_to_string(d.join("r.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);
    let jsonl = std::fs::read_to_string(d.join("r.jsonl")).unwrap();
    for line in jsonl.lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
    assert!(d.join("r.csv.manifest.json").exists());
}

#[test]
fn replay_detects_changed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "er", "--n", "60", "--p", "0.1", "--seed", "3", "--out", "g.txt"]);
    ok(d, &["publish", "g.txt", "--m", "10", "--sigma", "0.5", "--out", "p.bin"]);
    let kv = ok(d, &["replay", "p.bin.manifest.json"]);
    assert_eq!(kv["replay_outputs_identical"], "true");
    write(d, "g.txt", "0 1\n");
    let changed = rpdp(d, &["replay", "p.bin.manifest.json"]);
    assert_eq!(changed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&changed.stderr).contains("changed"));
}
