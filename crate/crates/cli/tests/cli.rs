use std::process::{Command, Output};

use serde_json::Value;

fn diffvir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffvir")).args(args).output().expect("binary runs")
}

fn reports(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is JSON"))
        .collect()
}

fn single(args: &[&str]) -> (i32, Value) {
    let out = diffvir(args);
    let mut rs = reports(&out);
    assert_eq!(rs.len(), 1, "{}", String::from_utf8_lossy(&out.stderr));
    (out.status.code().unwrap(), rs.remove(0))
}

#[test]
fn omega_cos_sin() {
    let (code, r) = single(&["omega", "--f", "cos", "--g", "sin"]);
    assert_eq!(code, 0);
    assert!((r["value"].as_f64().unwrap() + 1.0 / 24.0).abs() < 1e-15);
    assert_eq!(r["check_name"], "gelfand_fuchs");
}

#[test]
fn omega_kinds_differ_by_coboundary() {
    let value = |kind: &str| {
        single(&["omega", "--f", "cos2+sin", "--g", "sin2-cos", "--kind", kind]).1["value"].as_f64().unwrap()
    };
    let diff = value("printed") - value("bracket") - value("coboundary");
    assert!(diff.abs() < 1e-15);
}

#[test]
fn rot2pi_integer_spacing_passes() {
    let (code, r) = single(&["rot2pi", "--c", "1", "--h", "0.5,1.5,2.5", "--N", "6"]);
    assert_eq!(code, 0);
    assert!(r["value"].as_f64().unwrap() < 1e-10);
    assert_eq!(r["pass"], true);
}

#[test]
fn rot2pi_rejects_fractional_spacing() {
    let out = diffvir(&["rot2pi", "--c", "1", "--h", "0.5,0.75", "--N", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("integer spaced"));
    let (code, r) = single(&["rot2pi", "--c", "1", "--h", "0.5,0.75", "--N", "4", "--unchecked"]);
    assert_eq!(code, 1);
    assert!(r["value"].as_f64().unwrap() > 1.0);
}

#[test]
fn usage_errors_exit_two() {
    let out = diffvir(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(diffvir(&["omega", "--f", "tan", "--g", "sin"]).status.code(), Some(2));
    assert_eq!(diffvir(&["suite", "--criterion", "13"]).status.code(), Some(2));
    assert_eq!(diffvir(&["tmatrix", "--f", "cos", "--h", "0,1"]).status.code(), Some(2));
}

#[test]
fn numerical_errors_exit_three() {
    // Field degree above the truncation level.
    assert_eq!(diffvir(&["tmatrix", "--f", "cos5", "--N", "3"]).status.code(), Some(3));
    // Not orientation preserving.
    assert_eq!(diffvir(&["diffeo", "--gamma", "lift:2*sin"]).status.code(), Some(3));
}

#[test]
fn failed_check_exits_one() {
    let (code, r) = single(&["gram", "--c", "0.4", "--h", "0.3", "--N", "8"]);
    assert_eq!(code, 1);
    assert_eq!(r["pass"], false);
    let (code, _) = single(&["gram", "--c", "1", "--h", "0.5", "--N", "6"]);
    assert_eq!(code, 0);
}

#[test]
fn help_documents_every_subcommand() {
    let out = diffvir(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in [
        "norm",
        "s32",
        "compose",
        "invert",
        "pushforward",
        "schwarzian",
        "beta",
        "omega",
        "expflow",
        "mollify",
        "fragment",
        "gram",
        "lmatrix",
        "tmatrix",
        "tgamma",
        "commdefect",
        "energybound",
        "expT",
        "covdefect",
        "align",
        "directsum",
        "rot2pi",
        "suite",
        "field",
        "diffeo",
        "series",
        "oracle",
    ] {
        assert!(text.contains(&format!("\n  {sub} ")), "operation map misses {sub}");
    }
    assert!(text.contains("Exit codes"));
}

#[test]
fn exact_gram_strings() {
    let (_, r) = single(&["gram", "--exact", "--N", "2"]);
    assert_eq!(r["result"][2]["gram"][0][0], "4*h + 1/2*c");
    assert_eq!(r["result"][2]["gram"][1][1], "8*h^2 + 4*h");
    let (_, r) = single(&["oracle", "--word", "1,1,-1,-1"]);
    assert_eq!(r["result"], "8*h^2 + 4*h");
}

#[test]
fn same_seed_is_byte_identical() {
    let args = ["suite", "--profile", "quick", "--criterion", "4,9,11", "--seed", "7"];
    let a = diffvir(&args);
    let b = diffvir(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let rs = reports(&a);
    let summary = &rs.last().unwrap()["summary"];
    assert_eq!(summary["failed"], 0);
    assert_eq!(summary["checks"].as_u64().unwrap() as usize, rs.len() - 1);
    let names: Vec<&str> = rs[..rs.len() - 1].iter().map(|r| r["check_name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn json_out_mirrors_stdout() {
    let dir = std::env::temp_dir().join(format!("diffvir-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.jsonl");
    let out = diffvir(&["s32", "--f", "cos2", "--json-out", path.to_str().unwrap()]);
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn field_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("diffvir-field-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (_, r) = single(&["field", "--op", "derivative", "--f", "0.25*cos3"]);
    let path = dir.join("f.json");
    std::fs::write(&path, r["result"].to_string()).unwrap();
    // d/dθ (cos 3θ / 4) = −(3/4) sin 3θ, whose ‖·‖_{3/2} is (3/4)(1 + 3^{3/2}).
    let (_, s) = single(&["s32", "--f", path.to_str().unwrap()]);
    let expected = 0.75 * (1.0 + 3f64.powf(1.5));
    assert!((s["value"].as_f64().unwrap() - expected).abs() < 1e-12);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn fragment_and_inverse_reports() {
    let (code, r) = single(&["fragment", "--gamma", "lift:0.02*sin2"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"].as_array().unwrap().len(), 3);
    let (code, r) = single(&["invert", "--gamma", "exp:0.5:0.2*cos"]);
    assert_eq!(code, 0);
    assert!(r["value"].as_f64().unwrap() < 1e-9);
}

#[test]
fn commutator_defect_reports_window() {
    let (code, r) = single(&["commdefect", "--f", "cos2", "--g", "sin3", "--N", "10", "--h", "0.5"]);
    assert_eq!(code, 0);
    assert_eq!(r["window"], serde_json::json!([0, 5]));
}

#[test]
fn quick_suite_covers_every_criterion() {
    let out = diffvir(&["suite", "--profile", "quick"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let rs = reports(&out);
    let mut seen: Vec<u64> = rs.iter().filter_map(|r| r["criterion"].as_u64()).collect();
    seen.sort();
    seen.dedup();
    assert_eq!(seen, (1..=12).collect::<Vec<_>>());
    assert!(rs.iter().all(|r| r.get("runtime_ms").is_none()));
}
