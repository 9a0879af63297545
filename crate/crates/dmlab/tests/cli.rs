use std::path::PathBuf;
use std::process::{Command, Output};

fn dmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmlab"))
        .args(args)
        .env_remove("DMLAB_MAX_DEPTH")
        .output()
        .expect("spawn dmlab")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dmlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn example54_report_shape() {
    let out = dmlab(&["example", "ex5_4", "--p", "2/3", "--stages", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema"], "dmlab-report/1");
    assert_eq!(r["check"]["status"], "passed");
    assert_eq!(r["results"]["verdict"], "ZeroLimit");
    assert_eq!(r["results"]["partial_products_decreasing"], true);
    assert!(r.get("timing").is_none());
}

#[test]
fn config_file_with_flag_override() {
    let cfg = scratch("ex54.json");
    let plot = scratch("ex54.csv");
    std::fs::write(&cfg, r#"{"name": "ex5_4", "p": "2/3", "stages": 4}"#).unwrap();
    let out = dmlab(&[
        "example",
        "--config",
        cfg.to_str().unwrap(),
        "--p",
        "1/3",
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["inputs"]["p"]["value"], "1/3");
    let csv = std::fs::read_to_string(&plot).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("series,x,y_num,y_den,y_decimal"));
    assert_eq!(lines.filter(|l| l.starts_with("partial_product,")).count(), 4);
}

#[test]
fn json_measure_objects() {
    let out = dmlab(&["doubling", "scan", "--measure", r#"{"kind":"binomial","p":"1/2"}"#, "--depth", "6", "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["scan"]["C"]["value"], "2/1");
}

#[test]
fn depth_cap_is_a_hard_error() {
    let out = dmlab(&["--max-depth", "3", "cantor", "--beta", "constant:1/3", "--depth", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the cap 3"));

    let out = Command::new(env!("CARGO_BIN_EXE_dmlab"))
        .args(["cantor", "--beta", "constant:1/3", "--depth", "5"])
        .env("DMLAB_MAX_DEPTH", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn inconclusive_exits_two() {
    let out = dmlab(&["certify", "cutout", "--family", "geometric:1/4:1/2", "--count", "4", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["check"]["status"], "inconclusive");
}

#[test]
fn bad_input_exits_one() {
    assert_eq!(dmlab(&["example", "nosuch"]).status.code(), Some(1));
    assert_eq!(dmlab(&["seq", "--family", "geometric:1/2"]).status.code(), Some(1));
    assert_eq!(dmlab(&["qs", "pullback", "--C", "1/2", "--eta2", "2"]).status.code(), Some(1));
}

#[test]
fn seed_changes_samples_deterministically() {
    let run = |seed: &str| dmlab(&["--seed", seed, "doubling", "scan", "--measure", "binomial:1/3", "--depth", "5", "--trials", "30", "--wrong-c", "3/2"]).stdout;
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
}

#[test]
fn timing_is_opt_in() {
    let out = dmlab(&["--timing", "qs", "pullback", "--C", "2", "--eta2", "2"]);
    let r = json(&out);
    assert!(r["timing"]["wall_ms"].is_number());
    assert_eq!(r["results"]["constant"]["value"], "8/1");
}
