use std::process::{Command, Output};

use serde_json::Value;

fn volcano(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_volcano"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8")
}

fn json_ok(args: &[&str]) -> Value {
    let out = volcano(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(stdout(&out).trim()).expect("valid json")
}

#[test]
fn decide_matches_spec_output() {
    let out = volcano(&["decide", "--crater", "S2", "--ell", "2", "--depth", "1", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out).trim(),
        r#"{"verdict":"None","provenance":"Thm split_two_converse_low_depth"}"#
    );
}

#[test]
fn classgroup_matches_spec_output() {
    let out = volcano(&["classgroup", "--d", "-39"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), r#"{"h":4,"divisors":[4]}"#);
}

#[test]
fn help_exits_zero() {
    let out = volcano(&["decide", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("--crater"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["classgroup"][..],
        &["frobnicate"],
        &["classgroup", "--d", "-39", "--bogus"],
        &["decide", "--crater", "S2", "--ell", "2", "--depth", "1", "--k", "0"],
        &["classgroup", "--d", "-39", "--workers", "0"],
    ] {
        let out = volcano(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn domain_errors_exit_one_with_json() {
    for (args, kind) in [
        (&["classgroup", "--d", "5"][..], "NotADiscriminant"),
        (&["graph", "--p", "7", "--ell", "7"], "EllEqualsP"),
        (&["graph", "--p", "101", "--ell", "11"], "UnsupportedEll"),
        (&["decide", "--crater", "S1", "--n", "3", "--ell", "2", "--depth", "1", "--k", "1"], "InvalidSpec"),
        (&["classgroup", "--d", "-99999", "--class-group-cap", "1000"], "CapExceeded"),
    ] {
        let out = volcano(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let v: Value = serde_json::from_str(stdout(&out).trim()).expect("json error object");
        assert_eq!(v["error"], kind, "{args:?}");
        assert!(v["message"].as_str().is_some_and(|m| !m.is_empty()));
    }
}

#[test]
fn json_outputs_round_trip() {
    let cases: &[&[&str]] = &[
        &["classgroup", "--d", "-624"],
        &["decide", "--crater", "S4", "--ell", "2", "--depth", "3", "--k", "1", "--constructive"],
        &["decide", "--crater", "I1", "--ell", "3", "--depth", "2", "--k", "2"],
        &["search", "--d0", "-7", "--ell", "2", "--depth", "1", "--k", "1", "--pmax", "500"],
        &["verify", "--crater", "S2", "--ell", "3", "--depth", "1", "--k", "1", "--d0", "-20"],
        &["kappa", "--dk", "-39", "--ell", "2", "--d", "4"],
        &["graph", "--p", "101", "--ell", "3"],
    ];
    for args in cases {
        let out = volcano(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let text = stdout(&out);
        let text = text.trim_end_matches('\n');
        let v: Value = serde_json::from_str(text).expect("json");
        assert_eq!(serde_json::to_string(&v).unwrap(), text, "{args:?}");
    }
}

#[test]
fn verify_is_search_then_graph() {
    let search = json_ok(&["search", "--d0", "-20", "--ell", "3", "--depth", "1", "--k", "1", "--pmax", "2000"]);
    let p = search["primes"][0].as_u64().expect("a prime is found");
    let graph = json_ok(&["graph", "--p", &p.to_string(), "--ell", "3"]);
    let verify = json_ok(&["verify", "--crater", "S2", "--ell", "3", "--depth", "1", "--k", "1", "--d0", "-20", "--pmax", "2000"]);
    assert_eq!(verify["p"].as_u64(), Some(p));
    assert_eq!(verify["components"], graph["components"]);
    let direct = json_ok(&["verify", "--crater", "S2", "--ell", "3", "--depth", "1", "--k", "1", "--p", &p.to_string()]);
    assert_eq!(direct, verify);
    let appears = graph["components"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["shape"] == "(S2, 3, 1)");
    assert_eq!(verify["appears"].as_bool(), Some(appears));
    assert!(appears);
}

#[test]
fn kappa_agrees_and_pretty_is_a_table() {
    let v = json_ok(&["kappa", "--dk", "-39", "--ell", "2", "--d", "4"]);
    assert_eq!(v["match"], true);
    assert_eq!(v["closed_form"], v["brute_force"]);
    let out = volcano(&["kappa", "--dk", "-39", "--ell", "2", "--d", "4", "--pretty"]);
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().contains("closed form"));
    assert!(serde_json::from_str::<Value>(&text).is_err());
}

#[test]
fn heur_writes_csv_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i3_1.csv");
    let p = path.to_str().unwrap();
    let summary = json_ok(&["heur", "--ell", "3", "--e", "1", "--kind", "i1", "--xmax", "20000", "--stride", "5000", "--out", p]);
    assert_eq!(summary["rows"], 4);
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["x", "eligible", "hits", "ratio"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[3][0], "20000");
    assert_eq!(summary["hits"].as_u64().unwrap().to_string(), rows[3][2]);

    let out = volcano(&["heur", "--ell", "3", "--e", "1", "--kind", "i1", "--xmax", "20000", "--stride", "5000"]);
    let text = stdout(&out);
    assert_eq!(text, std::fs::read_to_string(&path).unwrap());
}

#[test]
fn heur_checkpoint_resume_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("scan.ck");
    let ck = ck.to_str().unwrap();
    let base = ["heur", "--ell", "5", "--e", "1", "--kind", "r2", "--stride", "2000", "--checkpoint", ck];
    let first = volcano(&[&base[..], &["--xmax", "6000"]].concat());
    assert_eq!(first.status.code(), Some(0));
    let resumed = volcano(&[&base[..], &["--xmax", "12000"]].concat());
    let fresh = volcano(&["heur", "--ell", "5", "--e", "1", "--kind", "r2", "--stride", "2000", "--xmax", "12000"]);
    assert_eq!(resumed.stdout, fresh.stdout);
    assert!(stdout(&resumed).starts_with(&stdout(&first)));
}

#[test]
fn heur_gnuplot_format() {
    let out = volcano(&["heur", "--ell", "3", "--e", "1", "--kind", "i1", "--xmax", "4000", "--stride", "2000", "--gnuplot"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# x eligible hits ratio"));
    assert_eq!(lines.next().unwrap().split(' ').count(), 4);
}

#[test]
fn graph_dot_file_annotates_components() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.dot");
    let v = json_ok(&["graph", "--p", "31", "--k", "2", "--ell", "2", "--dot", path.to_str().unwrap()]);
    let dot = std::fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("graph "));
    let total: u64 = v["components"].as_array().unwrap().iter().map(|c| c["count"].as_u64().unwrap()).sum();
    assert_eq!(dot.matches("subgraph cluster_").count() as u64, total);
    assert!(dot.contains("label=\"(S2, 2, 4)\""));
}

#[test]
fn workers_flag_does_not_change_output() {
    let a = volcano(&["graph", "--p", "1009", "--ell", "3", "--workers", "1"]);
    let b = volcano(&["graph", "--p", "1009", "--ell", "3", "--workers", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn pretty_text_is_not_json() {
    let out = volcano(&["classgroup", "--d", "-39", "--pretty"]);
    assert_eq!(stdout(&out), "h         4\ndivisors  4\n");
}
