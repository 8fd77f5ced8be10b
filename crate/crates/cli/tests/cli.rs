// SPDX-License-Identifier: Apache-2.0
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pumpkit")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn arg(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_output_is_a_certificate() {
    let sys = fixture("unit8.txt");
    let out = run(&["analyze", arg(&sys), "--bound-override", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("# vector 1 0"), "{text}");
    let cert = scratch("unit8.cert", &text);
    let v = run(&["verify", arg(&sys), arg(&cert)]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("valid pumpable"));
}

#[test]
fn tampered_certificate_is_rejected() {
    let sys = fixture("unit.txt");
    let cert = scratch("bad.cert", "kind pumpable i=0 j=1\npath 1 0 A ; 2 0 A ; 2 1 A\n");
    assert_eq!(run(&["verify", arg(&sys), arg(&cert)]).status.code(), Some(3));
}

#[test]
fn shields_of_unit_path() {
    let out = run(&["shields", arg(&fixture("unit.txt"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "0 1 1");
}

#[test]
fn blocker_is_fragile() {
    let out = run(&["pump-or-block", arg(&fixture("blocker.txt")), "--shield", "0", "1", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("kind fragile"));
}

#[test]
fn bound_is_exact() {
    let out = run(&["bound", "--tiles", "2", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("distance 1342177280"));
}

#[test]
fn invalid_file_exits_3() {
    let bad = scratch("bad.txt", "tile A east=g west=g\nseed 0 0 A\n");
    let out = run(&["validate", arg(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn render_emits_svg() {
    let out = run(&["render", arg(&fixture("blocker.txt")), "--shield", "0", "1", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let svg = stdout(&out);
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("class=\"region\""));
}

#[test]
fn reduce2ham_picks_westernmost_seed() {
    let input = scratch("line.2ham", "tile A north=- east=g south=- west=g\npath 0 0 A ; 1 0 A ; 2 0 A ; 3 0 A\n");
    let out = run(&["reduce2ham", arg(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("seed 0 0 A"));
    assert!(text.contains("path 1 0 A ; 2 0 A ; 3 0 A"));
}
