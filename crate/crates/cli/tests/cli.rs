use std::path::Path;
use std::process::{Command, Output};

fn qdalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdalg"))
        .args(args)
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures"))
        .output()
        .unwrap()
}

#[test]
fn anchors_on_malformed_document_is_a_load_error() {
    let out = qdalg(&["anchors", "malformed.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/vector_field/gamma/0/poly"));
}

#[test]
fn max_degree_changes_only_the_confirmation_header() {
    let low = qdalg(&["--max-degree", "1", "check", "tangent2.json"]);
    let default = qdalg(&["check", "tangent2.json"]);
    assert_eq!(low.status.code(), Some(0));
    let low = String::from_utf8(low.stdout).unwrap();
    let default = String::from_utf8(default.stdout).unwrap();
    assert!(low.contains("degree <= 1"));
    assert!(default.contains("degree <= 3"));
    let flags = |s: &str| {
        s.lines()
            .find(|l| l.starts_with("flags-json"))
            .unwrap()
            .to_string()
    };
    assert_eq!(flags(&low), flags(&default));
}

#[test]
fn unknown_subcommand_is_rejected() {
    let out = qdalg(&["frobnicate"]);
    assert_ne!(out.status.code(), Some(0));
}
