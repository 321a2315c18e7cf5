use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn ccsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccsp")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

#[test]
fn classify_order_is_tractable() {
    let o = ccsp(&["classify", &path("order.json")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("{0, 1} semilattice"));
}

#[test]
fn classify_one_in_three_is_np_complete() {
    let o = ccsp(&["classify", &path("one_in_three.json"), "--json"]);
    assert_eq!(code(&o), 3);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "np-complete");
    assert_eq!(v["witness_pair"], serde_json::json!([0, 1]));
}

#[test]
fn solve_chain_over_algebra_file() {
    let o = ccsp(&["solve", &path("chain.json"), "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "sat");
    assert_eq!(v["assignment"]["y"], 1);
    assert_eq!(v["assignment"]["z"], 1);
}

#[test]
fn solve_triangle_synthesizes_operations() {
    let o = ccsp(&["solve", &path("triangle.json")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("unsat"));
}

#[test]
fn np_complete_refusal_and_oracle_override() {
    let o = ccsp(&["solve", &path("one_in_three_instance.json"), "--json"]);
    assert_eq!(code(&o), 3);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "np-complete");
    let o = ccsp(&["solve", &path("one_in_three_instance.json"), "--force-oracle"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn unclosed_relation_is_invalid_input() {
    let o = ccsp(&["solve", &path("not_closed.json")]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not closed"));
}

#[test]
fn missing_and_malformed_files_are_invalid_input() {
    assert_eq!(code(&ccsp(&["solve", &path("nope.json")])), 2);
    let dir = std::env::temp_dir().join(format!("ccsp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    assert_eq!(code(&ccsp(&["solve", &bad.to_string_lossy()])), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn oracle_agrees_and_respects_budget() {
    let o = ccsp(&["oracle", &path("triangle.json")]);
    assert_eq!(code(&o), 1);
    let o = ccsp(&["oracle", &path("triangle.json"), "--budget", "7"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn generated_instance_solves_like_the_oracle() {
    let dir = std::env::temp_dir().join(format!("ccsp-gen-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for seed in 0..8 {
        let o = ccsp(&["gen", "instance", "--seed", &seed.to_string(), "--size", "3"]);
        assert_eq!(code(&o), 0);
        let f = dir.join(format!("i{seed}.json"));
        std::fs::write(&f, &o.stdout).unwrap();
        let s = ccsp(&["solve", &f.to_string_lossy()]);
        let b = ccsp(&["oracle", &f.to_string_lossy()]);
        assert_eq!(code(&s), code(&b), "seed {seed}");
    }
    let a = ccsp(&["gen", "algebra", "--seed", "5"]);
    assert_eq!(a.stdout, ccsp(&["gen", "algebra", "--seed", "5"]).stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn laws_and_bench_run() {
    let o = ccsp(&["laws", "--samples", "50", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["failures"], serde_json::json!([]));
    let o = ccsp(&["bench", "--sizes", "10", "--repeats", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("majority"));
}

#[test]
fn bad_arguments() {
    assert_eq!(code(&ccsp(&["gen", "algebra", "--weights", "1,2"])), 2);
    assert_eq!(code(&ccsp(&["bench", "--families", "cubic"])), 2);
}
