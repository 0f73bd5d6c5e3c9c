use std::process::{Command, Output};

fn twincurve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twincurve")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

#[test]
fn report_json_has_provenance() {
    let o = twincurve(&["--json", "report", "--epsilon", "1", "--p", "3"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["conductor"]["value"], 480);
    assert!(v["conductor"]["source"].is_string());
    assert_eq!(v["root_number"]["table"]["value"], -1);
}

#[test]
fn validation_errors_exit_2() {
    assert_eq!(code(&twincurve(&["report", "--epsilon", "1", "--p", "7"])), 2);
    assert_eq!(code(&twincurve(&["report", "--epsilon", "2", "--p", "3"])), 2);
    assert_eq!(code(&twincurve(&["report", "--epsilon", "1", "--p", "3", "--D", "15"])), 2);
    assert_eq!(code(&twincurve(&["advisor", "--epsilon", "1", "--p", "11", "--assume", "bogus"])), 2);
    assert_eq!(code(&twincurve(&["classgroup", "--disc", "-16"])), 2);
}

#[test]
fn budget_errors_exit_3() {
    assert_eq!(code(&twincurve(&["--max-prime", "50", "sweep", "--p-max", "100"])), 3);
    assert_eq!(code(&twincurve(&["--max-disc-imag", "100", "classgroup", "--disc", "-5460"])), 3);
    assert_eq!(code(&twincurve(&["--max-terms", "10", "lvalue", "--epsilon", "1", "--p", "5", "--terms", "50"])), 3);
}

#[test]
fn flags_beat_config_file() {
    let dir = std::env::temp_dir().join(format!("twincurve-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("budgets.toml");
    std::fs::write(&cfg, "[budgets]\nprime_enumeration = 50\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let base = ["sweep", "--p-max", "100", "--checks", "rootnumbers"];
    let with_cfg: Vec<&str> = ["--config", cfg].into_iter().chain(base).collect();
    assert_eq!(code(&twincurve(&with_cfg)), 3);
    let with_flag: Vec<&str> = ["--config", cfg, "--max-prime", "1000"].into_iter().chain(base).collect();
    assert_eq!(code(&twincurve(&with_flag)), 0);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_csv_is_byte_identical() {
    let args = ["sweep", "--p-max", "80", "--d-max", "25", "--l-max", "200"];
    let a = twincurve(&args);
    let b = twincurve(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("epsilon,p,q,D,mu,check,expected,actual,pass"));
}

#[test]
fn lvalue_and_classgroup_json() {
    let o = twincurve(&["--json", "lvalue", "--epsilon", "-1", "--p", "17"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["value"], 0.0);
    let o = twincurve(&["--json", "classgroup", "--disc", "-23"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["group"]["h"], 3);
}

#[test]
fn verify_subset() {
    let o = twincurve(&["verify", "--criterion", "4,5"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);
}
