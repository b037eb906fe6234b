use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stonework"));
    c.env_remove("STONEWORK_MAX_ENUM");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn json_out(o: &Output) -> Value {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).unwrap()
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("stonework-cli-{tag}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, content: &Value) -> String {
        let path = self.0.join(name);
        fs::write(&path, content.to_string()).unwrap();
        path.to_str().unwrap().to_string()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

#[test]
fn dualize_round_trips_through_the_inverse() {
    let dir = Scratch::new("dualize");
    for map in [json!([0]), json!([1, 0, 0]), json!([2, 2, 0, 1])] {
        let out = json_out(&run_stdin(&["dualize"], &map.to_string()));
        assert_eq!(out["self_map"], map);
        let endo = dir.file("endo.json", &out["ring_endo"]);
        assert_eq!(json_out(&run(&["dualize", "--inverse", &endo])), map);
    }
}

#[test]
fn theta_on_discrete_three_points() {
    let out = json_out(&run(&["theta", "--metric", "discrete:3"]));
    assert_eq!(out["count"], 27);
    let inj = json_out(&run(&["theta", "--metric", "discrete:3", "--injective"]));
    assert_eq!(inj["count"], 6);
}

#[test]
fn metrize_output_feeds_theta_and_kantorovich() {
    let dir = Scratch::new("metrize");
    let chain = dir.file(
        "chain.json",
        &json!({"carrier_size": 3, "chain": [{"classes": [[0, 1], [2]]}]}),
    );
    let metric = json_out(&run(&["metrize", "--chain", &chain]));
    assert_eq!(
        metric,
        json!({"dist": [["0", "1/2", "1"], ["1/2", "0", "1"], ["1", "1", "0"]]})
    );
    let m = dir.file("metric.json", &metric);
    // maps may not separate 0 and 1 from 2 by less than they started
    assert_eq!(json_out(&run(&["theta", "--metric", &m]))["count"], 15);
    let norm = json_out(&run(&["kantorovich", "--metric", &m, "--vector", "0,1"]));
    assert_eq!(norm["norm"], "1/2");
    assert_eq!(norm["pairing"], json!([[0, 1]]));
}

#[test]
fn monoid_and_metric_files_round_trip_through_check() {
    let dir = Scratch::new("check");
    let contrast = json_out(&run(&["example", "contrast", "--k", "2"]));
    assert_eq!(contrast["carrier_size"], 6);
    assert_eq!(contrast["certificate"]["left_nonexpansive"], true);
    assert_eq!(contrast["certificate"]["right_nonexpansive"], false);
    assert_eq!(
        contrast["obstruction_witnesses"].as_array().unwrap().len(),
        2
    );

    // Z2 with the discrete metric is nonexpansive on both sides
    let monoid = json!({"size": 2, "identity": 0, "table": [[0, 1], [1, 0]]});
    let m = dir.file("m.json", &monoid);
    let d = dir.file("d.json", &json!({"dist": [["0", "1"], ["1", "0"]]}));
    let out = json_out(&run(&[
        "check",
        "--monoid",
        &m,
        "--metric",
        &d,
        "--nonexpansive",
        "left",
    ]));
    assert_eq!(out["nonexpansive"], true);

    // in Z3 translating by 1 moves the close pair (0, 1) to (1, 2)
    let monoid = json!({"size": 3, "identity": 0, "table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]});
    let m = dir.file("m3.json", &monoid);
    let d = dir.file(
        "d3.json",
        &json!({"dist": [["0", "1/2", "1"], ["1/2", "0", "1"], ["1", "1", "0"]]}),
    );
    let o = run(&[
        "check",
        "--monoid",
        &m,
        "--metric",
        &d,
        "--nonexpansive",
        "left",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["nonexpansive"], false);
    assert_eq!(
        v["witness"],
        json!({"side": "left", "s": 1, "x": 0, "y": 1})
    );
}

#[test]
fn saturate_and_cover_ops() {
    let dir = Scratch::new("sat");
    let action = json!({
        "monoid": {"size": 2, "identity": 0, "table": [[0, 1], [1, 1]]},
        "carrier_size": 3,
        "act": [[0, 1, 2], [0, 0, 2]]
    });
    let family = json!({"carrier_size": 3, "members": [{"classes": [[0], [1, 2]]}]});
    let a = dir.file("a.json", &action);
    let f = dir.file("f.json", &family);
    let sat = json_out(&run(&["saturate", "--action", &a, "--family", &f]));
    // the preimage of {0}{1,2} under [0,0,2] is {0,1}{2}; their meet is discrete
    assert_eq!(sat["members"].as_array().unwrap().len(), 3);
    let again = dir.file("sat.json", &sat);
    assert_eq!(
        json_out(&run(&["saturate", "--action", &a, "--family", &again])),
        sat
    );

    let p = dir.file("p.json", &json!({"blocks": [[0, 1], [1, 2], [3]]}));
    let q = dir.file("q.json", &json!({"blocks": [[0, 1, 2], [2, 3]]}));
    let w = json_out(&run(&["cover-ops", "--op", "wedge", "--p", &p, "--q", &q]));
    // blocks are listed in order of their bitmasks
    assert_eq!(w, json!({"blocks": [[0, 1], [2], [1, 2], [3]]}));
    let s = json_out(&run(&["cover-ops", "--op", "star", "--p", &p]));
    assert_eq!(s, json!({"blocks": [[0, 1, 2], [3]]}));
    assert_eq!(
        json_out(&run(&["cover-ops", "--op", "ord", "--p", &p]))["order"],
        2
    );
}

#[test]
fn verify_duality_emits_tsv() {
    let o = run(&["verify-duality", "--points", "2"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "check\tparameters\tinstances\toutcome\telapsed_ms"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.split('\t').nth(3) == Some("pass")));
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = Scratch::new("bad");
    let o = run_stdin(&["dualize"], "[1, 0,\n 7]");
    assert_eq!(o.status.code(), Some(2));
    let o = run_stdin(&["dualize"], "[1, 0\n");
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");

    let broken = dir.file(
        "z3.json",
        &json!({"size": 3, "identity": 0, "table": [[0,1,2],[1,0,0],[2,0,1]]}),
    );
    let d = dir.file(
        "d.json",
        &json!({"dist": [["0","1","1"],["1","0","1"],["1","1","0"]]}),
    );
    let o = run(&[
        "check",
        "--monoid",
        &broken,
        "--metric",
        &d,
        "--nonexpansive",
        "left",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("associativity"));

    assert_eq!(run(&["theta"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", "--all", "--bound-points", "9"])
            .status
            .code(),
        Some(2)
    );
    let o = bin()
        .args(["theta", "--metric", "discrete:4"])
        .env("STONEWORK_MAX_ENUM", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn contrast_report_is_deterministic() {
    let a = json_out(&run(&[
        "example", "contrast", "--k", "4", "--report", "json",
    ]));
    let b = json_out(&run(&[
        "example", "contrast", "--k", "4", "--report", "json",
    ]));
    assert_eq!(a, b);
    assert_eq!(a["table_sha256"].as_str().unwrap().len(), 64);
    let right = &a["certificate"]["right_witness"];
    assert_eq!(right["side"], "right");
}
