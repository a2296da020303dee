use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_c2loop")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("c2loop-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn one_cube_numeric() {
    let o = run(&["kashaev", "solve", &fixture("one_cube.json"), &fixture("init_ones.json"), "--mode", "numeric"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "10.6568542495\n");
}

#[test]
fn shape_params_unit() {
    let o = run(&["--json", "shape", "params", "--a", "1", "--b", "1", "--c", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["R"], 1.0);
    assert_eq!(v["S"], 10.6568542495);
    assert_eq!(v["d"], 10.6568542495);
}

#[test]
fn symbolic_output_is_canonical_json() {
    let o = run(&["kashaev", "solve", &fixture("one_cube.json"), "--mode", "symbolic"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let p = c2loop::laurent::LaurentPoly::from_json(&v).unwrap();
    assert_eq!(p.n_terms(), 5);
    let t = run(&["taut", "partition", &fixture("one_cube.json"), "--symbolic"]);
    let w: serde_json::Value = serde_json::from_slice(&t.stdout).unwrap();
    assert_eq!(w["terms"], v["terms"]);
}

#[test]
fn correspondence_and_loops() {
    let o = run(&["--json", "dimers", "verify", &fixture("cube_sphere.json"), &fixture("half_weights.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["z_loop"], "68 + 48·√2");
    assert_eq!(v["verified"], true);
    let z = run(&["loops", "partition", &fixture("cube_sphere.json"), &fixture("half_weights_float.json")]);
    assert_eq!(stdout(&z), "Z = 135.882250994\n");
}

#[test]
fn taut_and_groves() {
    let o = run(&["taut", "verify", &fixture("two_cubes.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let g = run(&["--json", "groves", "verify", &fixture("three_cubes.json")]);
    assert_eq!(g.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&g.stdout).unwrap();
    assert_eq!(v["report"]["equal"], true);
    assert!(!v["groves"].as_array().unwrap().is_empty());
    let e = run(&["--json", "taut", "enumerate", &fixture("one_cube.json")]);
    let v: serde_json::Value = serde_json::from_slice(&e.stdout).unwrap();
    assert_eq!(v["count"], 5);
}

#[test]
fn input_errors_exit_2() {
    let missing = fixture("does_not_exist.json");
    for args in [
        vec!["graph", "validate", missing.as_str()],
        vec!["shape", "curve", "--lambda", "3.5"],
        vec!["shape", "rho", "--N", "2", "--R", "1"],
        vec!["shape", "params", "--a", "-1", "--b", "1", "--c", "1"],
        vec!["frobnicate"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let bad_order = run(&["kashaev", "solve", &fixture("one_cube.json"), &fixture("init_ones.json"), "--order", "shuffled"]);
    assert_eq!(bad_order.status.code(), Some(2));
    let d = scratch("bad");
    let junk = d.join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    assert_eq!(run(&["graph", "validate", junk.to_str().unwrap()]).status.code(), Some(2));
    let not_ff = d.join("ones.json");
    std::fs::write(&not_ff, r#"{"uniform": ["1", "1", "1", "1", "1"]}"#).unwrap();
    let o = run(&["dimers", "verify", &fixture("cube_sphere.json"), not_ff.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&d).unwrap();
}

#[test]
fn failed_check_exits_1() {
    let mut g: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("cube_sphere.json")).unwrap()).unwrap();
    g["vertices"][1]["color"] = "black".into();
    let d = scratch("recolor");
    let p = d.join("recolored.json");
    std::fs::write(&p, g.to_string()).unwrap();
    let o = run(&["graph", "validate", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("verification failed"));
    std::fs::remove_dir_all(&d).unwrap();
}

#[test]
fn outputs_are_byte_identical() {
    let d = scratch("repeat");
    for k in 0..2 {
        let csv = d.join(format!("rho{k}.csv"));
        let svg = d.join(format!("curve{k}.svg"));
        assert_eq!(run(&["shape", "rho", "--N", "15", "--R", "0.4", "--out", csv.to_str().unwrap()]).status.code(), Some(0));
        assert_eq!(run(&["shape", "curve", "--R", "0.4", "--points", "200", "--out", svg.to_str().unwrap()]).status.code(), Some(0));
    }
    let read = |n: &str| std::fs::read(d.join(n)).unwrap();
    assert_eq!(read("rho0.csv"), read("rho1.csv"));
    assert_eq!(read("curve0.svg"), read("curve1.svg"));
    let piped = run(&["shape", "rho", "--N", "15", "--R", "0.4"]);
    assert_eq!(piped.stdout, read("rho0.csv"));
    std::fs::remove_dir_all(&d).unwrap();
}

#[test]
fn thread_cap_does_not_change_results() {
    let args = ["dimers", "free-energy", &fixture("octa_pi4.json"), "--grid", "96"];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_c2loop")).args(args).env("C2LOOP_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_all_quick_reports_every_criterion() {
    let o = run(&["verify-all", "--quick"]);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 11, "{out}");
    for (k, l) in lines.iter().enumerate() {
        assert!(l.starts_with("PASS") || l.starts_with("FAIL"), "{l}");
        assert!(l.contains(&format!("{:>2} ", k + 1)), "{l}");
    }
    let failed: Vec<&&str> = lines.iter().filter(|l| l.starts_with("FAIL")).collect();
    let expected = if failed.is_empty() { 0 } else { 1 };
    assert_eq!(o.status.code(), Some(expected));
    assert!(failed.iter().all(|l| l.starts_with("FAIL  6")), "{failed:?}");
}
