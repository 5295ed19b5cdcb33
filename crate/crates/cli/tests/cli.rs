use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_serre-ah"))
        .args(args)
        .env("SERRE_AH_FIXTURES", fixtures())
        .output()
        .expect("spawn serre-ah")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn doc(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

#[test]
fn weights_zero_class_case_iii() {
    let o = run(&["weights", "--p", "3", "--f", "2", "--sig", "1,3", "--class", "zero"]);
    assert_eq!(code(&o), 0);
    let mut w = strings(&doc(&o)["weights"]);
    w.sort();
    assert_eq!(w, ["[0,0;1,3]", "[1,2;1,1]", "[1,2;3,3]", "[2,0;3,1]"]);
}

#[test]
fn weights_support_and_twist() {
    let o = run(&["weights", "--p", "3", "--f", "2", "--sig", "1,2", "--class", "tau0,tau1", "--twist", "5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(strings(&doc(&o)["weights"]), ["[2,1;1,2]"]);
}

#[test]
fn verify_lemmas_passes() {
    let o = run(&["verify-lemmas", "--p", "3", "--N", "4", "--M", "24"]);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    assert_eq!(d["failed"], 0);
    // 9 + 81 pairs and 3 + 9 scalings
    assert_eq!(d["checked"], 102);
}

#[test]
fn replay_tables_is_clean() {
    let o = run(&["replay-tables", "--table", "all"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let d = doc(&o);
    for (name, entry) in d.as_object().unwrap() {
        assert_eq!(entry["diff"], Value::Array(vec![]), "{name}");
        assert_eq!(entry["checks_pass"], true, "{name}");
    }
}

#[test]
fn replay_single_table() {
    let o = run(&["replay-tables", "--table", "qp"]);
    assert_eq!(code(&o), 0);
    assert_eq!(doc(&o).as_object().unwrap().len(), 1);
    assert_eq!(code(&run(&["replay-tables", "--table", "nope"])), 2);
}

#[test]
fn class_from_norms_ia() {
    let o = run(&["class-from-norms", "--fixture", "ia.json"]);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    assert_eq!(d["index"], 9);
    assert_eq!(d["filtration_degree"], "15/8");
    assert_eq!(strings(&d["weights"]), ["[2,1;1,2]"]);
    assert_eq!(strings(&d["support"]), ["c_tau0", "c_tau1"]);
}

#[test]
fn low_precision_exits_with_precision_code() {
    let o = run(&["class-from-norms", "--fixture", "iiib1.json", "--precision", "12"]);
    assert_eq!(code(&o), 3);
    assert_eq!(doc(&o)["module"], "norm_group");
}

#[test]
fn norm_membership_of_the_ia_span() {
    let o = run(&["norm-membership", "--fixture", "ia.json", "--terms", "1,1,5;-1,3,7"]);
    assert_eq!(code(&o), 0);
    let rows = doc(&o)["results"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r["member"] == true));
    let o = run(&["norm-membership", "--fixture", "ia.json", "--terms", "1,1,5"]);
    assert!(doc(&o)["results"].as_array().unwrap().iter().all(|r| r["member"] == false));
}

#[test]
fn match_hecke_inline_rows() {
    let rows = r#"[{"a":"a^3","d":"a^7","N":7,"expect":"10A"},{"a":"0","N":11,"expect":"2u"}]"#;
    assert_eq!(code(&run(&["match-hecke", "--input", rows])), 0);
    let wrong = r#"[{"a":"0","N":11,"expect":"3"}]"#;
    let o = run(&["match-hecke", "--input", wrong]);
    assert_eq!(code(&o), 1);
    assert_eq!(doc(&o)["failed"], 1);
}

#[test]
fn match_hecke_table_file() {
    let o = run(&["match-hecke", "--input", "hecke/examples.json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(doc(&o)["failed"], 0);
}

#[test]
fn schema_and_usage_errors() {
    assert_eq!(code(&run(&["match-hecke", "--input", r#"{"bogus":1}"#])), 2);
    assert_eq!(code(&run(&["weights", "--p", "3", "--f", "2", "--sig", "1"])), 2);
    assert_eq!(code(&run(&["weights", "--p", "4", "--f", "1", "--sig", "1"])), 2);
    assert_eq!(code(&run(&["weights", "--p", "3", "--f", "2", "--sig", "1,2", "--class", "tau9x"])), 2);
    assert_eq!(code(&run(&["filtration", "--p", "3"])), 2);
    assert_eq!(code(&run(&["class-from-norms", "--fixture", "missing.json"])), 2);
    assert_eq!(code(&run(&["mu", "--p", "3", "--f", "2", "--sig", "1,2", "--j", "2"])), 2);
}

#[test]
fn fixture_dir_comes_from_the_environment() {
    let tmp = std::env::temp_dir().join(format!("serre-ah-empty-{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_serre-ah"))
        .args(["class-from-norms", "--fixture", "ia.json"])
        .env("SERRE_AH_FIXTURES", &tmp)
        .current_dir(&tmp)
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    std::fs::remove_dir_all(&tmp).ok();
}

#[test]
fn output_is_byte_stable() {
    for args in [
        &["filtration", "--p", "5", "--f", "2", "--sig", "2,3"][..],
        &["admissible", "--p", "3", "--f", "3", "--sig", "1,3,2"][..],
        &["class-from-norms", "--fixture", "iiia.json"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn output_flag_writes_the_document() {
    let path = std::env::temp_dir().join(format!("serre-ah-out-{}.json", std::process::id()));
    let o = run(&["mu", "--p", "3", "--f", "2", "--sig", "1,3", "--j", "1", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let d: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(d["mu"], serde_json::json!([0]));
    std::fs::remove_file(&path).ok();
}
