use std::process::{Command, Output};

fn egc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_egc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn counts() {
    let o = egc(&["count", "-g", "0", "-n", "3", "-d", "3", "--tangency", "1,2:3", "--incidence", "1:12", "--unmarked"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "80160");
    let o = egc(&["count", "-g", "1", "-n", "3", "-d", "3", "--tangency", "1,2:3", "--lines", "12"]);
    assert_eq!(stdout(&o), "9000");
    let o = egc(&["count", "-n", "3", "-d", "2", "--tangency", "2,2:1", "--lines", "7", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], "116");
}

#[test]
fn exit_codes() {
    let unsupported = egc(&["count", "-g", "1", "-n", "5", "-d", "2", "--tangency", "1,4:2"]);
    assert_eq!(unsupported.status.code(), Some(3));
    let bad_degree = egc(&["count", "-n", "3", "-d", "2", "--tangency", "1,2:1", "--lines", "8"]);
    assert_eq!(bad_degree.status.code(), Some(2));
    let bad_flag = egc(&["count", "-n", "3", "-d", "2", "--tangency", "1;2"]);
    assert_eq!(bad_flag.status.code(), Some(2));
    let bad_divisor = egc(&["zcount", "-n", "2", "-d", "3", "--points", "8", "--divisor", "p1+x2"]);
    assert_eq!(bad_divisor.status.code(), Some(2));
    let bad_sum = egc(&["zcount", "-n", "2", "-d", "3", "--points", "8", "--divisor", "p1+p2"]);
    assert_eq!(bad_sum.status.code(), Some(2));
    let unknown = egc(&["table", "nope"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn zcounts() {
    let o = egc(&["zcount", "-n", "2", "-d", "4", "--points", "11", "--divisor", "p1+p2+p3+p4"]);
    assert_eq!(stdout(&o), "62");
    let o = egc(&["zcount", "-n", "2", "-d", "3", "--points", "8", "--lines", "1", "--divisor", "p1+p2+l1"]);
    assert_eq!(stdout(&o), "1");
}

#[test]
fn dimension() {
    let o = egc(&["dim", "-n", "3", "-d", "2", "--tangency", "1,2:2", "--lines", "7"]);
    assert_eq!(stdout(&o), "1");
}

#[test]
fn tables_print_marks() {
    let o = egc(&["table", "ez4"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.ends_with("PASS")).count(), 5);
    let o = egc(&["table", "eqesc-nums"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 10);
    assert!(out.lines().nth(2).unwrap().contains("DISCREPANCY"));
}

#[test]
fn traces() {
    let args = ["trace", "-n", "3", "-d", "1", "--tangency", "1,2:1", "--lines", "4"];
    let o = egc(&[&args[..], &["--format", "json"]].concat());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], "2");
    let kids = v["children"].as_array().unwrap();
    let rules: Vec<&str> = kids.iter().map(|c| c["node"]["rule"].as_str().unwrap()).collect();
    assert_eq!(rules, ["type-I", "type-IIplain"]);
    let o = egc(&[&args[..], &["--format", "dot"]].concat());
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph trace {") && dot.ends_with('}'));
    let nodes = dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count();
    let edges = dot.lines().filter(|l| l.contains("->")).count();
    assert_eq!(edges + 1, nodes);
}

#[test]
fn cache_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("egc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("counts.cache");
    let path_s = path.to_str().unwrap();
    let args = ["count", "-n", "3", "-d", "2", "--tangency", "1,2:2", "--lines", "8", "--cache", path_s];
    let cold = egc(&args);
    let first = std::fs::read_to_string(&path).unwrap();
    assert!(first.starts_with("EGC-CACHE v1\n"));
    let warm = egc(&args);
    assert_eq!(stdout(&cold), stdout(&warm));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first);
    std::fs::write(&path, "EGC-CACHE v0\n").unwrap();
    assert_eq!(egc(&args).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}
