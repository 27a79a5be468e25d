use std::path::{Path, PathBuf};

use sheafbm::cli::run_cli;
use sheafbm::formats::{load_graph, to_json, GraphFile, KlTableFile, SheafResult};

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(std::iter::once("sheafbm").chain(args.iter().copied()), &mut out, &mut err);
    Outcome { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(o.code, 0, "{:?}: {}", args, o.err);
    o.out
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const CHAIN: &str = r#"{
  "lattice_rank": 2,
  "vertices": ["a", "b", "c"],
  "edges": [
    {"u": "a", "v": "b", "label": [1, 0]},
    {"u": "b", "v": "c", "label": [0, 1]},
    {"u": "a", "v": "c", "label": [1, 1]}
  ],
  "order_covers": [["a", "b"], ["b", "c"]]
}"#;

#[test]
fn graph_validate_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "chain.json", CHAIN);
    assert!(ok(&["graph", "validate", "--graph-file", &good]).starts_with("OK 3 vertices, 3 edges"));

    let looped = write(dir.path(), "loop.json", &CHAIN.replace(r#""u": "b", "v": "c""#, r#""u": "b", "v": "b""#));
    let o = run(&["graph", "validate", "--graph-file", &looped]);
    assert_eq!(o.code, 2);
    assert!(o.err.contains("LOOP"), "{}", o.err);

    let doubled = write(dir.path(), "double.json", &CHAIN.replace(r#""label": [1, 1]}"#, r#""label": [1, 1]}, {"u": "c", "v": "a", "label": [1, -1]}"#));
    let o = run(&["graph", "validate", "--graph-file", &doubled]);
    assert_eq!(o.code, 2);
    assert!(o.err.contains("DOUBLE_EDGE"), "{}", o.err);

    let o = run(&["graph", "validate", "--graph-file", &good, "--field", "fp:2"]);
    assert_eq!(o.code, 2);
    assert!(o.err.contains("GKM"), "{}", o.err);

    let broken = write(dir.path(), "broken.json", "{\n  \"lattice_rank\": 2,\n  \"vertices\": [\n");
    assert_eq!(run(&["graph", "validate", "--graph-file", &broken]).code, 3);
    assert_eq!(run(&["graph", "validate", "--graph-file", "/nonexistent/graph.json"]).code, 3);
}

#[test]
fn graph_file_run_matches_chain() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "chain.json", CHAIN);
    let csv = ok(&["bm", "run", "--graph-file", &good, "--w", "a", "--cutoff", "6", "--format", "csv"]);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "x,orbit,rank_poly");
    assert_eq!(rows.len(), 4);
    assert!(rows[1..].iter().all(|r| r.ends_with(",1")), "{}", csv);
    assert_eq!(run(&["bm", "run", "--graph-file", &good, "--cutoff", "6"]).code, 3);
    assert_eq!(run(&["bm", "run", "--graph-file", &good, "--w", "zz", "--cutoff", "6"]).code, 3);
}

#[test]
fn artifacts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let window = dir.path().join("window.json");
    ok(&["alcoves", "build", "--type", "affine-A1", "--box", "0..3", "--out", window.to_str().unwrap()]);
    let text = std::fs::read_to_string(&window).unwrap();
    let file: GraphFile = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json(&file), text);
    assert_eq!(load_graph(&text).unwrap().file, file);
    assert_eq!(file.vertices.len(), 4);

    let quotient: GraphFile = serde_json::from_str(&ok(&["graph", "quotient", "--graph-file", window.to_str().unwrap()])).unwrap();
    assert_eq!(quotient.vertices.len(), 2);
    assert_eq!(quotient.edges.len(), 1);

    let sheaf = ok(&["bm", "run", "--type", "A2-bruhat", "--cutoff", "8", "--verify", "full"]);
    let result: SheafResult = serde_json::from_str(&sheaf).unwrap();
    assert_eq!(to_json(&result), sheaf);
    assert_eq!(result.stalks.len(), 6);
    assert!(result.verification.as_ref().unwrap().passed);

    let kl = ok(&["kl", "table", "--type", "B2"]);
    let table: KlTableFile = serde_json::from_str(&kl).unwrap();
    assert_eq!(to_json(&table), kl);
    assert_eq!(table.cartan_type, "B2");
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        ok(&["bm", "run", "--type", "affine-A2", "--box", "-1..1", "--cutoff", "6", "--out", p.to_str().unwrap()]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let names: Vec<String> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert!(names.iter().all(|n| !n.ends_with(".tmp")), "{:?}", names);
}

#[test]
fn extension_orders_agree_on_output() {
    let lex = ok(&["bm", "run", "--type", "A3-bruhat", "--w", "s2s1s3s2", "--cutoff", "8", "--order", "lex"]);
    let rev = ok(&["bm", "run", "--type", "A3-bruhat", "--w", "s2s1s3s2", "--cutoff", "8", "--order", "revlex"]);
    assert_eq!(lex, rev);
}

#[test]
fn compare_matches_and_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let bm = dir.path().join("bm.json");
    let kl = dir.path().join("kl.json");
    let bm_path = bm.to_str().unwrap();
    let kl_path = kl.to_str().unwrap();
    ok(&["bm", "run", "--type", "A3-bruhat", "--w", "s2s1s3s2", "--cutoff", "8", "--out", bm_path]);
    ok(&["kl", "table", "--type", "A3", "--out", kl_path]);
    assert!(ok(&["compare", "--bm", bm_path, "--kl", kl_path]).starts_with("MATCH 14 stalks"));

    let mut table: KlTableFile = serde_json::from_str(&std::fs::read_to_string(&kl).unwrap()).unwrap();
    let entry = table.entries.iter_mut().find(|e| e.x == "s2" && e.w == "s2s1s3s2").unwrap();
    assert_eq!(entry.poly, [(0, 1), (1, 1)].into());
    entry.poly = [(0, 1)].into();
    std::fs::write(&kl, to_json(&table)).unwrap();
    let o = run(&["compare", "--bm", bm_path, "--kl", kl_path]);
    assert_eq!(o.code, 2);
    assert!(o.out.contains("s2"), "{}", o.out);
}

#[test]
fn kl_csv_column() {
    let csv = ok(&["kl", "table", "--type", "A3", "--w", "s2s1s3s2", "--format", "csv"]);
    assert!(csv.lines().any(|l| l == "s2,s2s1s3s2,1 + q"), "{}", csv);
    assert!(csv.lines().any(|l| l == "e,s2s1s3s2,1 + q"), "{}", csv);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bm", "run", "--type", "A2-bruhat", "--field", "fp:2"]).code, 2);
    assert_eq!(run(&["bm", "run", "--type", "A2-bruhat", "--field", "fp:9"]).code, 3);
    assert_eq!(run(&["bm", "run", "--type", "Z9-bruhat"]).code, 3);
    assert_eq!(run(&["bm", "run", "--type", "A2-bruhat", "--box", "0..1"]).code, 3);
    assert_eq!(run(&["bm", "run", "--type", "affine-A2"]).code, 3);
    assert_eq!(run(&["bm", "run", "--bogus"]).code, 3);
    assert_eq!(run(&["kl", "table", "--type", "D4"]).code, 3);
    let o = run(&["bm", "run", "--type", "A3-bruhat", "--w", "s2s1s3s2", "--cutoff", "2"]);
    assert_eq!(o.code, 4);
    assert!(o.err.contains("CUTOFF_TOO_LOW"), "{}", o.err);
    let o = run(&["bm", "run", "--type", "affine-A2", "--box", "-2..3", "--margin", "2", "--cutoff", "6"]);
    assert_eq!(o.code, 4);
    assert!(o.err.contains("CLOSURE_UNCERTIFIED"), "{}", o.err);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn verify_subcommand_reports_checks() {
    let o = ok(&["bm", "verify", "--type", "affine-A1", "--box", "-2..4", "--cutoff", "8"]);
    let result: SheafResult = serde_json::from_str(&o).unwrap();
    let v = result.verification.unwrap();
    assert!(v.passed);
    assert!(v.checks.iter().any(|c| c.name == "flabby"));
}

#[test]
fn selftest_matrix() {
    let o = run(&["selftest", "--filter", "gluing", "--count", "5"]);
    assert_eq!(o.code, 0, "{}", o.out);
    let lines: Vec<&str> = o.out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l.ends_with("PASS")));

    let o = run(&["selftest", "--filter", "flabbiness", "--count", "3", "--inject-mutation"]);
    assert_eq!(o.code, 2);
    assert!(o.out.contains("FAIL"), "{}", o.out);

    assert_eq!(run(&["selftest", "--filter", "no_such_suite"]).code, 3);
}

#[test]
fn documented_examples() {
    let dir = tempfile::tempdir().unwrap();
    let bm = dir.path().join("s3.json");
    let kl = dir.path().join("a2.json");
    ok(&["bm", "run", "--type", "A2-bruhat", "--w", "longest", "--field", "q", "--cutoff", "12", "--out", bm.to_str().unwrap()]);
    ok(&["kl", "table", "--type", "A2", "--out", kl.to_str().unwrap()]);
    assert!(ok(&["compare", "--bm", bm.to_str().unwrap(), "--kl", kl.to_str().unwrap()]).starts_with("MATCH 6 stalks"));

    let csv = ok(&["bm", "run", "--type", "affine-A1", "--w", "A0", "--box", "-4..8", "--cutoff", "10", "--format", "csv"]);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.ends_with(",1")), "{}", csv);
}

#[test]
fn full_selftest_passes() {
    let o = run(&["selftest", "--count", "20"]);
    assert_eq!(o.code, 0, "{}", o.out);
    assert_eq!(o.out.lines().filter(|l| l.ends_with("PASS")).count(), 11, "{}", o.out);
}
