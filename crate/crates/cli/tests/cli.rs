use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn ruelle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ruelle")).args(args).output().expect("run ruelle")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn exit_codes() {
    assert_eq!(ruelle(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(ruelle(&["multiplicity", "--family", "real-hyperbolic", "--n", "1"]).status.code(), Some(10));
    assert_eq!(ruelle(&["multiplicity", "--betti", "1,2,0,1"]).status.code(), Some(13));
    assert_eq!(ruelle(&["spectrum", "--max-word-length", "2", "--max-length=-1"]).status.code(), Some(14));
    assert_eq!(
        ruelle(&["zeta", "--s", "0.1", "--max-word-length", "2", "--max-length", "4"]).status.code(),
        Some(15)
    );
    assert_eq!(ruelle(&["--config", "/nonexistent/ruelle.json", "euler-table"]).status.code(), Some(16));
    let out = ruelle(&["--config", "/nonexistent/ruelle.json", "euler-table"]);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn config_supplies_defaults_and_flags_win() {
    let path = scratch("config.json");
    std::fs::write(&path, r#"{"family": "complex-hyperbolic", "n": 2, "chi": 3}"#).unwrap();
    let p = path.to_str().unwrap();

    let from_config = json(&ruelle(&["--config", p, "multiplicity"]));
    assert_eq!(from_config["family"], "complex-hyperbolic(2)");
    assert_eq!(from_config["m0"], 6);

    let overridden = json(&ruelle(&["--config", p, "multiplicity", "--chi", "5"]));
    assert_eq!(overridden["m0"], 10);

    std::fs::write(&path, r#"{"famly": "complex-hyperbolic"}"#).unwrap();
    assert_eq!(ruelle(&["--config", p, "multiplicity"]).status.code(), Some(16));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["zeta", "--s", "2.5", "--kind", "ruelle", "--max-word-length", "6", "--max-length", "9"];
    let first = ruelle(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, ruelle(&args).stdout);

    let spec = ["spectrum", "--max-word-length", "6", "--max-length", "9"];
    let seq = ["spectrum", "--max-word-length", "6", "--max-length", "9", "--sequential"];
    assert_eq!(ruelle(&spec).stdout, ruelle(&seq).stdout);
}

#[test]
fn manifest_records_spectrum_digest() {
    let csv = scratch("bolza.csv");
    let c = csv.to_str().unwrap();
    let written = json(&ruelle(&["spectrum", "--max-word-length", "4", "--max-length", "8", "--out", c]));
    let reread = json(&ruelle(&["zeta", "--s", "3", "--spectrum", c]));
    assert_eq!(reread["schema_version"], 1);
    assert_eq!(written["manifest"]["spectrum_sha256"], reread["manifest"]["spectrum_sha256"]);
    assert!(reread["manifest"].get("timestamp_unix").is_none());

    let stamped = json(&ruelle(&["--timestamp", "zeta", "--s", "3", "--spectrum", c]));
    assert!(stamped["manifest"]["timestamp_unix"].is_u64());
}

#[test]
fn presentation_file_reproduces_builtin_classes() {
    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/data/bolza.json");
    let columns = |out: Output| -> Vec<String> {
        assert!(out.status.success());
        String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                format!("{},{},{},{}", f[0], f[2], f[3], f[4])
            })
            .collect()
    };
    let builtin = columns(ruelle(&["spectrum", "--max-word-length", "5", "--max-length", "9"]));
    let parsed = columns(ruelle(&["spectrum", "--presentation", file, "--max-word-length", "5", "--max-length", "9"]));
    assert_eq!(builtin, parsed);
}
