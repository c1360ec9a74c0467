use std::path::PathBuf;
use std::process::{Command, Output};

fn m3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_m3")).args(args).env_remove("M3_CACHE_DIR").output().expect("run m3")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8")
}

fn json_lines(o: &Output) -> Vec<serde_json::Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

fn frac(v: &serde_json::Value) -> (i64, i64) {
    (v["num"].as_i64().unwrap(), v["den"].as_i64().unwrap())
}

#[test]
fn compute_hopf3_two() {
    let o = m3(&["--format", "json", "compute", "--family", "hopf3", "--params", "2", "--invariants", "gamma,m"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = json_lines(&o);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["gamma"], 19);
    assert_eq!(frac(&rows[0]["m"]), (16, 1));
}

#[test]
fn compute_braid_beta() {
    let o = m3(&["compute", "--braid", r#"{"strands":2,"word":[1,1]}"#, "--invariants", "beta"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "beta\n0\n");
}

#[test]
fn compute_ring_link_gamma() {
    let o = m3(&["compute", "--family", "l0", "--params", "1,1,1", "--invariants", "gamma"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "gamma\n0\n");
}

#[test]
fn csv_writes_fractions() {
    let o = m3(&["--format", "csv", "compute", "--family", "figure", "--params", "6", "--invariants", "m,lk"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "m,lk\n-1/4,\"(1,1,1)\"\n");
}

#[test]
fn emitted_diagram_reads_back() {
    let args = ["--format", "json", "compute", "--family", "hopf_fibers", "--params", "1,-1,1", "--invariants", "lk,gamma,m"];
    let first = json_lines(&m3(&args))[0].clone();
    let dir = tempdir("diagram");
    let path = dir.join("link.json");
    std::fs::write(&path, first["diagram"].to_string()).unwrap();
    let o = m3(&["--format", "json", "compute", "--diagram", path.to_str().unwrap(), "--invariants", "lk,gamma,m"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let second = &json_lines(&o)[0];
    for key in ["lk", "gamma", "m"] {
        assert_eq!(first[key], second[key], "{key}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn wrong_component_count_exits_3() {
    let o = m3(&["compute", "--family", "hopf2", "--params", "2", "--invariants", "gamma"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("3-component"));
}

#[test]
fn malformed_input_exits_2_naming_field() {
    let o = m3(&["compute", "--braid", r#"{"strands":2,"word":[1,3]}"#]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("word[1]"));
    let o = m3(&["compute", "--family", "hopf3", "--params", "1,2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = m3(&["compute", "--family", "figure", "--params", "12"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn paper_table_rows() {
    let o = m3(&["--format", "json", "paper-table"]);
    assert!(o.status.success());
    let rows = json_lines(&o);
    let status: Vec<(&str, &str)> =
        rows.iter().map(|r| (r["example"].as_str().unwrap(), r["status"].as_str().unwrap())).collect();
    assert_eq!(
        status,
        [
            ("fig6", "pass"),
            ("fig7", "pass"),
            ("fig8", "pass"),
            ("fig9", "sign_flagged"),
            ("fig10", "fail"),
            ("hopf(2,2,2)", "fail")
        ]
    );
    assert_eq!(frac(&rows[0]["m"]), (-1, 4));
    assert_eq!(frac(&rows[3]["m"]), (64, 1));
    assert_eq!(frac(&rows[4]["m"]), (-4, 1));
}

#[test]
fn sweep_reports_law() {
    let o = m3(&[
        "--format",
        "json",
        "sweep-asymptotic",
        "--family",
        "hopf_fibers",
        "--params",
        "1,1,1",
        "--lambdas",
        "2,1,1;1,1,1",
    ]);
    assert!(o.status.success());
    let rows = json_lines(&o);
    assert_eq!(frac(&rows[0]["m"]), (-4, 1));
    assert_eq!(rows[0]["status"], "pass");
    assert_eq!(frac(&rows[1]["m"]), (-1, 4));
    assert_eq!(rows[1]["status"], "pass");
}

#[test]
fn oracle_check_small_corpus() {
    let o = m3(&["--format", "json", "oracle-check", "--max-crossings", "4"]);
    let rows = json_lines(&o);
    let conway: Vec<_> = rows.iter().filter(|r| r["identity"].as_str().unwrap().starts_with("conway:")).collect();
    assert!(!conway.is_empty());
    assert!(conway.iter().all(|r| r["status"] == "pass"));
    // Only the three-fiber closed forms disagree with the engine.
    let failing: Vec<&str> =
        rows.iter().filter(|r| r["status"] == "fail").map(|r| r["identity"].as_str().unwrap()).collect();
    assert!(failing.iter().all(|id| id.starts_with("fiber_")), "{failing:?}");
    assert_eq!(o.status.code(), Some(if failing.is_empty() { 0 } else { 4 }));
}

#[test]
fn oracle_check_catches_corrupt_engine() {
    let o = m3(&["--format", "json", "oracle-check", "--max-crossings", "4", "--corrupt-engine"]);
    assert_eq!(o.status.code(), Some(4));
    let rows = json_lines(&o);
    assert!(rows.iter().any(|r| r["identity"].as_str().unwrap().starts_with("conway:") && r["status"] == "fail"));
}

#[test]
fn output_is_deterministic() {
    let a = m3(&["--jobs", "1", "paper-table"]);
    let b = m3(&["--jobs", "4", "paper-table"]);
    assert_eq!(a.stdout, b.stdout);
    let a = m3(&["--format", "json", "--seed", "7", "oracle-check", "--max-crossings", "6"]);
    let b = m3(&["--format", "json", "--seed", "7", "--jobs", "3", "oracle-check", "--max-crossings", "6"]);
    assert_eq!(a.stdout, b.stdout);
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("m3-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn memo_cache_round_trip() {
    let dir = tempdir("cache");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_m3"))
            .args(["compute", "--family", "figure", "--params", "8", "--invariants", "m"])
            .env("M3_CACHE_DIR", &dir)
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    let cache = std::fs::read_to_string(dir.join("skein-memo.jsonl")).unwrap();
    assert!(cache.lines().count() > 0);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(stdout(&second), "m\n-4\n");
    std::fs::remove_dir_all(&dir).unwrap();
}
