use std::path::PathBuf;
use std::process::{Command, Output};

fn cyclotome(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclotome")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn hh_of_k_as_json() {
    let o = cyclotome(&["hh", "--zoo", "k", "--window", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    let rows = v["tables"]["hh"].as_array().unwrap();
    for n in 0..=4 {
        let row = rows.iter().find(|r| r["degree"] == n).unwrap();
        assert_eq!(row["dimension"], i64::from(n == 0));
        assert_eq!(row["trusted"], true);
    }
}

#[test]
fn validate_good_and_broken_files() {
    let good = cyclotome(&["validate", "--input", &data("dual_numbers.json")]);
    assert_eq!(good.status.code(), Some(0));
    let bad = cyclotome(&["validate", "--input", &data("broken.json"), "--format", "text"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("failure:"));
}

#[test]
fn syntax_error_reports_position() {
    let o = cyclotome(&["validate", "--input", &data("syntax_error.json")]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn file_input_matches_zoo() {
    let a = cyclotome(&["hc", "--input", &data("dual_numbers.json"), "--window", "3", "--format", "csv"]);
    let b = cyclotome(&["hc", "--zoo", "dual_numbers", "--window", "3", "--format", "csv"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn chern_of_file_complex() {
    let o = cyclotome(&["chern", "--input", &data("koszul_k.json"), "--window", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["records"]["character"]["euler_characteristic"], 1);
}

#[test]
fn resource_cap_exit_code() {
    let o = cyclotome(&["hh", "--zoo", "truncated:4", "--window", "6", "--max-basis", "100"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_field_and_out_file() {
    assert_eq!(cyclotome(&["hh", "--field", "Fp:4"]).status.code(), Some(1));
    let dir = std::env::temp_dir().join(format!("cyclotome-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("r.csv");
    let o = cyclotome(&["hh", "--zoo", "product:2", "--window", "2", "--format", "csv", "--field", "Fp:7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("degree,dimension,trusted\n0,2,true\n"));
}
