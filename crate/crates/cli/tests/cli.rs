use std::fs;
use std::path::Path;

use serde_json::Value;
use tempfile::TempDir;

const CHAIN3: &str =
    r#"{"modes":["1","2","3"],"edges":[{"u":"1","v":"2","w":"1"},{"u":"2","v":"3","w":"1"}]}"#;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cvgraph").chain(args.iter().copied());
    let code = cvgraph_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn apply_x_on_chain_middle() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "chain3.json", CHAIN3);
    let (code, out, _) = run(&["apply", "--graph", &g, "--measure", "2:x@m"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["graph"]["modes"], serde_json::json!(["1", "3"]));
    assert_eq!(v["graph"]["edges"], serde_json::json!([]));
    let byproducts = v["byproducts"].as_array().unwrap();
    assert_eq!(byproducts.len(), 2);
    for b in byproducts {
        assert_eq!(b["displacement"]["p"]["terms"]["m"], "1");
        assert_eq!(b["symplectic"], serde_json::json!([["1", "0"], ["0", "1"]]));
    }
}

#[test]
fn unknown_vertex_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "chain3.json", CHAIN3);
    let (code, out, err) = run(&["apply", "--graph", &g, "--measure", "9:x@m"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("unknown vertex 9"), "{err}");
}

#[test]
fn bad_graph_and_bad_usage() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "bad.json", r#"{"modes":["1"],"edges":[{"u":"1","v":"1","w":"1"}]}"#);
    assert_eq!(run(&["export-dot", "--graph", &g]).0, 1);
    assert_eq!(run(&["export-dot", "--graph", "/nonexistent/g.json"]).0, 1);
    assert_eq!(run(&["apply", "--graph", &g]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["verify", "--random", "3", "--max-vertices", "4", "--unknown"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn fresh_symbols_follow_action_order() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "chain5.json", &serde_json::to_string(&cvgraph::WeightedGraph::chain(5).to_doc()).unwrap());
    let (code, out, _) = run(&["apply", "--graph", &g, "--measure", "2:x", "4:p@m1", "3:theta:1"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let actions: Vec<&str> = v["steps"].as_array().unwrap().iter().map(|s| s["action"].as_str().unwrap()).collect();
    assert_eq!(actions, ["2:x@m2", "4:p@m1", "3:theta:1@m3"]);
}

#[test]
fn apply_writes_out_and_dot_files() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "chain3.json", CHAIN3);
    let out_path = dir.path().join("r.json");
    let dot_path = dir.path().join("r.dot");
    let (code, out, _) = run(&[
        "apply",
        "--graph",
        &g,
        "--measure",
        "2:theta:1@m",
        "--out",
        out_path.to_str().unwrap(),
        "--dot",
        dot_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["graph"]["edges"][0]["w"], "-1");
    assert_eq!(fs::read_to_string(&dot_path).unwrap(), "graph G {\n  \"1\";\n  \"3\";\n  \"1\" -- \"3\" [label=\"-1\"];\n}\n");
}

#[test]
fn lc_prints_graph_and_unitary() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "chain3.json", CHAIN3);
    let (code, out, _) = run(&["lc", "--graph", &g, "--vertex", "2", "--delta", "-2"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["graph"]["edges"].as_array().unwrap().len(), 3);
    assert_eq!(v["unitary"].as_array().unwrap().len(), 3);
}

fn verify_report(dir: &Path, seed: &str) -> (i32, String) {
    let p = dir.join(format!("report-{seed}.jsonl"));
    let (code, _, _) = run(&[
        "verify",
        "--random",
        "100",
        "--max-vertices",
        "6",
        "--seed",
        seed,
        "--covariance",
        "--out",
        p.to_str().unwrap(),
    ]);
    (code, fs::read_to_string(p).unwrap())
}

#[test]
fn verify_is_deterministic_and_passes() {
    let dir = TempDir::new().unwrap();
    let (code, first) = verify_report(dir.path(), "7");
    assert_eq!(code, 0);
    let lines: Vec<Value> = first.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 100);
    assert!(lines.iter().all(|l| l["symbolic_equal"] == true));
    for l in &lines {
        if let Some(s) = l["covariance_slope"].as_f64() {
            assert!((-2.05..=-1.95).contains(&s), "slope {s}");
        }
    }
    let (_, again) = verify_report(dir.path(), "7");
    assert_eq!(first, again);
    let (_, other) = verify_report(dir.path(), "8");
    assert_ne!(first, other);
}

#[test]
fn verify_default_seed_is_zero() {
    let (a, out_default, _) = run(&["verify", "--random", "5", "--max-vertices", "4"]);
    let (b, out_zero, _) = run(&["verify", "--random", "5", "--max-vertices", "4", "--seed", "0"]);
    assert_eq!((a, b), (0, 0));
    assert_eq!(out_default, out_zero);
}

#[test]
fn plan_finds_theta_step() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "chain3.json", CHAIN3);
    let t = write(&dir, "target.json", r#"{"modes":["1","3"],"edges":[{"u":"1","v":"3","w":"-1"}]}"#);
    let (code, out, _) = run(&["plan", "--graph", &g, "--target", &t, "--max-depth", "2", "--bases", "x,theta:1"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["steps"][0]["vertex"], "2");
    assert_eq!(v["steps"][0]["basis"], "theta:1");
    // p on the middle vertex reaches the same graph and is tried first
    let (_, out, _) = run(&["plan", "--graph", &g, "--target", &t, "--max-depth", "1", "--bases", "p,theta:1"]);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["steps"][0]["basis"], "p");

    let far = write(&dir, "far.json", r#"{"modes":["1","3"],"edges":[{"u":"1","v":"3","w":"7"}]}"#);
    let (code, out, _) = run(&["plan", "--graph", &g, "--target", &far, "--max-depth", "1", "--bases", "x"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["steps"].is_null());
    assert_eq!(run(&["plan", "--graph", &g, "--target", &far, "--max-depth", "1", "--bases", "y"]).0, 1);
}

#[test]
fn export_dot_has_one_line_per_vertex_and_edge() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", r#"{"modes":["a","b","c"],"edges":[{"u":"a","v":"c","w":"-3/2"}]}"#);
    let (code, out, _) = run(&["export-dot", "--graph", &g]);
    assert_eq!(code, 0);
    assert_eq!(out, "graph G {\n  \"a\";\n  \"b\";\n  \"c\";\n  \"a\" -- \"c\" [label=\"-3/2\"];\n}\n");
}
