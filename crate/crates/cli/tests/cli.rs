use std::process::{Command, Output};

fn jt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jt")).args(args).env_remove("JT_FOCK_MAX").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const EB_SWEEP: &[&str] = &["sweep", "--model", "eb", "--sweep", "coupling", "--min", "0", "--max", "2", "--count", "5", "--delta", "1"];

#[test]
fn csv_sweep_has_header_and_rows() {
    let o = jt(EB_SWEEP);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "L_over_omega,c1,gamma,delta,entropy,ground_energy,N,converged,residual");
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[0].starts_with("0,"));
    assert!(rows[4].starts_with("2,"));
}

#[test]
fn json_output_echoes_the_sweep() {
    let mut args = EB_SWEEP.to_vec();
    args.extend(["--format", "json"]);
    let o = jt(&args);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["spec"]["model"], "eb");
    assert_eq!(v["spec"]["grid"]["count"], 5);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["entropy"], 0.0);
    assert!(rows.iter().all(|r| r["converged"] == true));
}

#[test]
fn ee_sweep_reports_ansatz_and_exact_columns() {
    let o = jt(&["sweep", "--model", "ee", "--sweep", "coupling", "--min", "0.5", "--max", "1", "--count", "2", "--fock", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert!(header.contains("entropy_ansatz") && header.contains("entropy_exact") && header.contains("delta_s"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    let a = stdout(&jt(EB_SWEEP));
    let b = stdout(&jt(EB_SWEEP));
    let mut single = EB_SWEEP.to_vec();
    single.extend(["--threads", "1"]);
    let c = stdout(&jt(&single));
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(jt(&["sweep", "--model", "nope"]).status.code(), Some(1));
    assert_eq!(jt(&["frobnicate"]).status.code(), Some(1));
    let inverted = ["sweep", "--model", "eb", "--sweep", "coupling", "--min", "2", "--max", "1", "--count", "3"];
    assert_eq!(jt(&inverted).status.code(), Some(1));
    assert_eq!(jt(&["verify", "no-such-suite"]).status.code(), Some(1));
    assert_eq!(jt(&["figure", "no-such-figure"]).status.code(), Some(1));
}

#[test]
fn capped_truncation_flags_rows_and_exits_with_two() {
    let o = Command::new(env!("CARGO_BIN_EXE_jt"))
        .args(["sweep", "--model", "eb", "--sweep", "coupling", "--min", "3", "--max", "4", "--count", "2", "--delta", "1"])
        .env("JT_FOCK_MAX", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.contains(",false,")));
}

#[test]
fn verify_suite_passes() {
    let o = jt(&["verify", "ansatz-integrals"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).is_empty());
}

#[test]
fn bifurcation_reports_threshold_metadata() {
    let o = jt(&["bifurcation", "--model", "eb", "--delta", "1", "--min", "0", "--max", "2", "--count", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let t = v["metadata"]["threshold_continuation"].as_f64().unwrap();
    assert!((t - 1.0).abs() < 1e-8);
    assert!(!v["rows"].as_array().unwrap().is_empty());
}

#[test]
fn out_flag_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("jt-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.csv");
    let mut args = EB_SWEEP.to_vec();
    let p = path.to_str().unwrap();
    args.extend(["--out", p]);
    let o = jt(&args);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&jt(EB_SWEEP)));
    std::fs::remove_dir_all(&dir).unwrap();
}
