mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{fixture, fixture_path};

fn uvl2ivml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uvl2ivml"))
        .args(args)
        .env_remove("UVL2IVML_CAP")
        .output()
        .unwrap()
}

fn path(name: &str) -> String {
    fixture_path(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn transform_writes_the_reference_project() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("onlineshop.ivml");
    let o = uvl2ivml(&[
        "transform",
        &path("onlineshop.uvl"),
        "-o",
        out.to_str().unwrap(),
        "--naming",
        "pretty",
        "--project-name",
        "OnlineShop",
        "--enum-name",
        "Platform=PlatformType",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), fixture("onlineshop.ivml"));
    // nothing else left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn transform_to_stdout_is_deterministic() {
    let a = uvl2ivml(&["transform", &path("onlineshop.uvl"), "-o", "-"]);
    let b = uvl2ivml(&["transform", &path("onlineshop.uvl"), "-o", "-"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a), fixture("onlineshop_suffix.ivml"));
}

#[test]
fn missing_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.ivml");
    let o = uvl2ivml(&["transform", "missing.uvl", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn duplicate_names_exit_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.ivml");
    let o = uvl2ivml(&["transform", &path("dup_names.uvl"), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("dup_names.uvl:5:13: error:"), "{err}");
    assert!(err.contains("Cart"), "{err}");
    assert!(!out.exists());
}

#[test]
fn pretty_collision_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("clash.uvl");
    std::fs::write(&src, "features\n R\n  optional\n   P\n    alternative\n     A\n     B\n").unwrap();
    let o = uvl2ivml(&["transform", src.to_str().unwrap(), "-o", "-", "--naming", "pretty"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("collides"));
    assert!(o.stdout.is_empty());
}

#[test]
fn check_strict_onlineshop() {
    let o = uvl2ivml(&["check", &path("onlineshop.uvl"), "--mode", "strict"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "EQUIV uvl=4256 ivml=4256 bijective=true");
}

#[test]
fn check_faithful_optional_or() {
    let o = uvl2ivml(&["check", &path("optional_or.uvl"), "--mode", "faithful"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "EQUIV uvl=4 ivml=7 bijective=false");
    let o = uvl2ivml(&["check", &path("optional_or.uvl"), "--mode", "faithful", "-v"]);
    let out = stdout(&o);
    assert!(out.contains("unmapped assignment: {P=false, P__SET__1__INSTANCE={A}}"), "{out}");
    assert!(out.ends_with("EQUIV uvl=4 ivml=7 bijective=false\n"), "{out}");
}

#[test]
fn check_strict_optional_or() {
    let o = uvl2ivml(&["check", &path("optional_or.uvl"), "--mode", "strict"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("bijective=true"));
}

#[test]
fn check_over_cap_exits_2() {
    let o = uvl2ivml(&["check", &path("huge.uvl")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cap of 24"), "{}", stderr(&o));

    let o = Command::new(env!("CARGO_BIN_EXE_uvl2ivml"))
        .args(["check", &path("onlineshop.uvl")])
        .env("UVL2IVML_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    let o = uvl2ivml(&["check", &path("onlineshop.uvl"), "--cap", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_cap_flag_beats_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_uvl2ivml"))
        .args(["check", &path("onlineshop.uvl"), "--cap", "20"])
        .env("UVL2IVML_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn validate_fixtures() {
    assert_eq!(uvl2ivml(&["validate", &path("onlineshop.uvl")]).status.code(), Some(0));
    assert_eq!(uvl2ivml(&["validate", &path("onlineshop.ivml")]).status.code(), Some(0));
    let o = uvl2ivml(&["validate", &path("garbage.uvl")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("garbage.uvl:5:9: error:"), "{}", stderr(&o));
}

#[test]
fn validate_lang_override() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("model");
    std::fs::copy(fixture_path("onlineshop.ivml"), &src).unwrap();
    let p = src.to_str().unwrap();
    assert_eq!(uvl2ivml(&["validate", p]).status.code(), Some(2));
    assert_eq!(uvl2ivml(&["validate", p, "--lang", "ivml"]).status.code(), Some(0));
    assert_eq!(uvl2ivml(&["validate", p, "--lang", "uvl"]).status.code(), Some(1));
}

#[test]
fn validate_reports_ivml_violations_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("bad.ivml");
    std::fs::write(&src, "project P {\n    Boolean a;\n    size(a) >= 1;\n}\n").unwrap();
    let o = uvl2ivml(&["validate", src.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.ivml:3:5: error:"), "{}", stderr(&o));
}

#[test]
fn unwritable_output_exits_2() {
    let o = uvl2ivml(&[
        "transform",
        &path("onlineshop.uvl"),
        "-o",
        Path::new("/nonexistent-dir/out.ivml").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
