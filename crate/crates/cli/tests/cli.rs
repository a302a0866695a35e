use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

const FREE_REL_A: &str = "family = free\ngenerators = a b\nperipheral A = a\n";
const SURFACE: &str = cuspidal::fixtures::SURFACE;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuspidal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
    config: PathBuf,
    cache: PathBuf,
}

fn built(presentation: &str, radius: u32, depth: u32) -> Fixture {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("p.txt");
    let cache = dir.path().join("space.cache");
    std::fs::write(&config, presentation).unwrap();
    let r = radius.to_string();
    let d = depth.to_string();
    let out = run(&["build", "--config", s(&config), "--cache", s(&cache), "--radius", &r, "--depth", &d]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    Fixture { dir, config, cache }
}

fn query(f: &Fixture, args: &[&str]) -> Output {
    let mut all = vec!["query", "--config", s(&f.config), "--cache", s(&f.cache)];
    all.extend_from_slice(args);
    run(&all)
}

#[test]
fn build_is_reproducible() {
    let f = built(FREE_REL_A, 6, 5);
    let first = std::fs::read(&f.cache).unwrap();
    let again = f.dir.path().join("again.cache");
    let out = run(&["build", "--config", s(&f.config), "--cache", s(&again), "--radius", "6", "--depth", "5"]);
    assert!(out.status.success());
    assert_eq!(first, std::fs::read(&again).unwrap());
    let summary = &json(&out)["summary"];
    // 2 * 3^6 - 1 Cayley vertices; each of the 3^6 cosets of <a> meeting
    // the ball gets 5 layers over its members
    assert_eq!(summary["cayley_vertices"], 1457);
    assert_eq!(summary["vertices"].as_u64().unwrap(), 1457 * 6);
}

#[test]
fn radius_zero_is_one_vertex() {
    let f = built(FREE_REL_A, 0, 3);
    let out = query(&f, &["dist", "e", "e"]);
    assert_eq!(json(&out)["distance"]["value"], 0);
    let text = std::fs::read_to_string(&f.cache).unwrap();
    assert!(text.contains("radius 0"));
    assert!(text.lines().any(|l| l == "[vertices] 4"), "one Cayley vertex and its three layers");
}

#[test]
fn empty_presentation_is_rejected() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("empty.txt");
    std::fs::write(&config, "# nothing\n").unwrap();
    let cache = dir.path().join("c");
    let out = run(&["build", "--config", s(&config), "--cache", s(&cache)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
    assert!(!cache.exists());
}

#[test]
fn distance_along_the_peripheral() {
    let f = built(FREE_REL_A, 8, 4);
    let out = query(&f, &["dist", "e", "a^8"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["distance"]["value"], 6);
    assert_eq!(v["distance"]["certified"], true);
    let g = json(&query(&f, &["geodesic", "e", "a^8"]));
    assert_eq!(g["length"], 6);
    assert_eq!(g["path"].as_array().unwrap().len(), 7);
}

#[test]
fn gromov_of_a_point_with_itself() {
    let f = built(FREE_REL_A, 5, 3);
    let v = json(&query(&f, &["gromov", "a b b", "a b b"]));
    assert_eq!(v["product"], 3.0);
}

#[test]
fn same_limit_set_has_a_sharp_interval() {
    let f = built(SURFACE, 3, 3);
    let v = json(&query(&f, &["dl", "e:2", "e:3"]));
    assert_eq!(v["same_limit_set"], true);
    assert_eq!(v["d_l"]["lower"], v["d_l"]["upper"]);
    let w = json(&query(&f, &["cutpoints", "a c", "c a"]));
    assert_eq!(w["points"].as_array().unwrap().len(), 3);
}

#[test]
fn bad_inputs_are_reported() {
    let f = built(FREE_REL_A, 3, 2);
    let out = query(&f, &["dist", "e", "a^9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown vertex"));
    let other = f.dir.path().join("other.txt");
    std::fs::write(&other, "family = free\ngenerators = a b\nperipheral B = b\n").unwrap();
    let out = run(&["query", "--config", s(&other), "--cache", s(&f.cache), "dist", "e", "a"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stale cache"));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = run(&["verify", "--suite", "everything"]);
    assert_eq!(out.status.code(), Some(64));
    let out = run(&["verify", "--suite", "close"]);
    assert_eq!(out.status.code(), Some(2), "a space suite without a cache");
}

#[test]
fn e1_fixture_detects_growth() {
    let out = run(&["verify", "--suite", "e1-fixture"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert!(v["report"]["e1"]["growth"].as_f64().unwrap() >= 2.0);
}

#[test]
fn horoball_normal_forms() {
    let out = run(&["verify", "--suite", "horoball-nf", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["mismatches"], 0);
}

#[test]
fn reports_are_reproducible() {
    let f = built(SURFACE, 3, 3);
    let mut reports = Vec::new();
    for k in 0..2 {
        let out_dir = f.dir.path().join(format!("out{k}"));
        let out = run(&[
            "verify", "--suite", "metric-axioms", "--config", s(&f.config), "--cache", s(&f.cache),
            "--net", "8", "--samples", "20", "--seed", "7", "--out", s(&out_dir),
        ]);
        assert!(matches!(out.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&out.stderr));
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out_dir)
            .unwrap()
            .map(|e| e.unwrap())
            .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
            .collect();
        files.sort();
        reports.push(files);
    }
    assert_eq!(reports[0], reports[1]);
    let names: Vec<&str> = reports[0].iter().map(|f| f.0.as_str()).collect();
    assert_eq!(
        names,
        ["metric-axioms.d_l_lower.csv", "metric-axioms.d_l_upper.csv", "metric-axioms.d_v.csv", "metric-axioms.json"]
    );
}
