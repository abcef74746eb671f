use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value as Json;

fn spc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spc")).args(args).output().unwrap()
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus")
}

fn example(name: &str) -> String {
    corpus().join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_prints_value_and_witness() {
    let o = spc(&["run", &example("mpe.sp")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains('6'), "{out}");
    assert!(out.contains("{not p, q}"), "{out}");
}

#[test]
fn json_output_is_stable() {
    for file in ["wmc.sp", "hybrid_done.sp", "robot_phi.sp", "convex_max.sp"] {
        let a = spc(&["run", "--json", &example(file)]);
        let b = spc(&["run", "--json", &example(file)]);
        assert_eq!(a.status.code(), Some(0), "{file}");
        assert_eq!(a.stdout, b.stdout, "{file}");
        let j: Json = serde_json::from_slice(&a.stdout).unwrap();
        assert!(j.get("backend").is_some() && j.get("value").is_some(), "{j}");
    }
}

#[test]
fn json_rationals_keep_numerator_and_denominator() {
    let o = spc(&["run", "--json", &example("hybrid_done.sp")]);
    let j: Json = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["value"]["numerator"], "2");
    assert_eq!(j["value"]["denominator"], "5");
    assert_eq!(j["exact"], true);
}

#[test]
fn mc_is_seeded() {
    let args = ["run", "--json", "--backend", "mc", "--samples", "20000", "--seed", "4"];
    let mut a = args.to_vec();
    let f = example("volume_box.sp");
    a.push(&f);
    let (x, y) = (spc(&a), spc(&a));
    assert_eq!(x.stdout, y.stdout);
    let j: Json = serde_json::from_slice(&x.stdout).unwrap();
    assert_eq!(j["exact"], false);
    assert!(j["std_error"].as_f64().unwrap() > 0.0);
}

#[test]
fn parse_errors_exit_one_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sp");
    std::fs::write(&bad, "(set-logic PL)\n(set-algebra [NAT,+,0])\n(count (p and))\n").unwrap();
    let o = spc(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("3:"), "{err}");
}

#[test]
fn engine_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("unbounded.sp");
    std::fs::write(
        &f,
        "(set-logic LRA) (set-algebra [REAL,+,*,0,1]) (declare-function x () REAL)
         (declare-measure x LEBESGUE) (count (x >= 0))",
    )
    .unwrap();
    let o = spc(&["run", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn wrong_backend_is_an_engine_error() {
    let o = spc(&["run", "--backend", "vertex-enum", &example("mpe.sp")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn corpus_check_passes() {
    let o = spc(&["corpus-check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains(", 0 failed"));
}

#[test]
fn corpus_check_names_a_broken_case() {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(corpus()).unwrap() {
        let p = entry.unwrap().path();
        std::fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
    }
    let expected = dir.path().join("expected.toml");
    let text = std::fs::read_to_string(&expected).unwrap();
    let broken = text.replacen("value = \"13\"", "value = \"14\"", 1);
    assert_ne!(text, broken);
    std::fs::write(&expected, broken).unwrap();

    let o = Command::new(env!("CARGO_BIN_EXE_spc"))
        .args(["corpus-check", "--json"])
        .env("SPC_CORPUS_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let reports: Vec<Json> = serde_json::from_slice(&o.stdout).unwrap();
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| r["passed"] == false)
        .map(|r| r["file"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["wmc.sp"]);
}

#[test]
fn factorize_reads_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    std::fs::write(&csv, "1,2\n2,4\n").unwrap();
    let o = spc(&["factorize", "--json", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j: Json = serde_json::from_slice(&o.stdout).unwrap();
    assert!(j["value"]["float"].as_f64().or(j["value"].as_f64()).unwrap() <= 1e-3, "{j}");

    std::fs::write(&csv, "1,2\n2\n").unwrap();
    assert_eq!(spc(&["factorize", csv.to_str().unwrap()]).status.code(), Some(1));
}
