mod common;

use std::path::Path;
use std::process::{Command, Output};

use copent::csv_io::{load_csv, CsvOptions};
use copent_core::rng::SplitMix64;

fn copent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_copent"))
        .args(args)
        .env_remove("COPENT_JOBS")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = copent(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// X ~ N(0,1), Y = X³, Z independent.
fn write_cubic(path: &Path, n: usize) {
    let mut rng = SplitMix64::new(99);
    let mut text = String::from("X,Y,Z\n");
    for _ in 0..n {
        let x = rng.standard_normal();
        let z = rng.standard_normal();
        text.push_str(&format!("{x},{},{z}\n", x * x * x));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn cubic_pipeline_finds_one_group() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("D.csv");
    let m = dir.path().join("M.csv");
    let g = dir.path().join("G.json");
    write_cubic(&d, 1000);
    ok(&[
        "assoc",
        "--input",
        s(&d),
        "--measure",
        "ce",
        "--k",
        "3",
        "--output",
        s(&m),
    ]);
    let out = ok(&["groups", "--matrix", s(&m), "--threshold", "0.1", "--output", s(&g)]);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    let groups = report["groups"].as_array().unwrap();
    assert_eq!(groups.len(), 1);
    assert_eq!(groups[0]["members"], serde_json::json!([0, 1]));
    assert_eq!(groups[0]["names"], serde_json::json!(["X", "Y"]));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[1,2]"));
}

#[test]
fn pearson_heatmap_has_one_cell_per_entry() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("D.csv");
    let m = dir.path().join("M.csv");
    let h = dir.path().join("H.svg");
    write_cubic(&d, 200);
    ok(&["assoc", "--input", s(&d), "--measure", "pearson", "--output", s(&m)]);
    ok(&["heatmap", "--matrix", s(&m), "--measure", "pearson", "--out", s(&h)]);
    let svg = std::fs::read_to_string(&h).unwrap();
    assert_eq!(svg.matches(r#"<rect class="cell""#).count(), 9);
    ok(&["heatmap", "--matrix", s(&m), "--mask-diagonal=false", "--out", s(&h)]);
    ok(&[
        "heatmap",
        "--matrix",
        s(&m),
        "--mask-diagonal",
        "--clamp-nonneg",
        "--out",
        s(&h),
    ]);
}

#[test]
fn identical_arguments_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("D.csv");
    write_cubic(&d, 500);
    let mut outputs = Vec::new();
    for (i, jobs) in ["1", "4", "1"].iter().enumerate() {
        let m = dir.path().join(format!("M{i}.json"));
        ok(&[
            "assoc",
            "--input",
            s(&d),
            "--json",
            "--jobs",
            jobs,
            "--seed",
            "7",
            "--output",
            s(&m),
        ]);
        outputs.push(std::fs::read(&m).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn column_order_does_not_change_the_entry() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("D.csv");
    write_cubic(&d, 400);
    let a = ok(&["assoc", "--input", s(&d), "--columns", "1,3"]).stdout;
    let b = ok(&["assoc", "--input", s(&d), "--columns", "Z,X"]).stdout;
    let entry = |out: &[u8]| {
        String::from_utf8_lossy(out)
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .to_string()
    };
    let (ea, eb) = (entry(&a), entry(&b));
    assert_ne!(ea, "NA");
    assert_eq!(ea, eb);
}

#[test]
fn k_not_below_rows_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("D.csv");
    write_cubic(&d, 50);
    let out = copent(&["assoc", "--input", s(&d), "--k", "50"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k must be < number of rows"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("D.csv");
    write_cubic(&d, 50);
    assert_eq!(
        copent(&["assoc", "--input", s(&d), "--columns", "NOPE"]).status.code(),
        Some(1)
    );
    assert_eq!(
        copent(&["assoc", "--input", s(&d), "--measure", "kendall", "--k", "4"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        copent(&["assoc", "--input", s(&d), "--measure", "bogus"]).status.code(),
        Some(1)
    );
    assert_eq!(
        copent(&["assoc", "--input", "/no/such/file.csv"]).status.code(),
        Some(2)
    );
    std::fs::write(&d, "a,b\n1,2\n3\n").unwrap();
    assert_eq!(copent(&["assoc", "--input", s(&d)]).status.code(), Some(2));
    assert_eq!(copent(&["--help"]).status.code(), Some(0));
    assert_eq!(copent(&[]).status.code(), Some(1));
}

#[test]
fn constant_columns_warn_and_leave_na() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("D.csv");
    std::fs::write(&d, "a,b,c\n1,5,2\n2,5,1\n3,5,4\n4,5,3\n5,5,6\n").unwrap();
    let out = ok(&["assoc", "--input", s(&d), "--measure", "spearman"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "a,b,c");
    assert!(text.lines().nth(1).unwrap().starts_with("NA,NA,"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("constant"));
}

#[test]
fn convert_round_trips_the_reference_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("small.csv");
    ok(&["convert", "--xpt", s(&common::data_path("small.xpt")), "--out", s(&out)]);
    let got = load_csv(&out, &CsvOptions::default()).unwrap();
    let want = load_csv(common::data_path("small.csv"), &CsvOptions::default()).unwrap();
    assert_eq!(got, want);

    let g = dir.path().join("golden.csv");
    let run = ok(&["convert", "--xpt", s(&common::data_path("golden.xpt")), "--out", s(&g)]);
    assert!(String::from_utf8_lossy(&run.stderr).contains("LBDNAME"));
    assert_eq!(
        load_csv(&g, &CsvOptions::default()).unwrap(),
        load_csv(common::data_path("golden.csv"), &CsvOptions::default()).unwrap()
    );
}

#[test]
fn xpt_input_and_drop_rows_imputation() {
    let xpt = common::data_path("golden.xpt");
    let out = ok(&[
        "assoc",
        "--input",
        s(&xpt),
        "--measure",
        "pearson",
        "--columns",
        "LBXA,LBXB,LBXC",
        "--impute",
        "drop_rows",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn synth_then_recover_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("S.csv");
    let m = dir.path().join("M.json");
    let spec = r#"{"kind":"blocks","sizes":[3,2],"within_rho":0.9,"between_rho":0.0,"n_rows":800,"seed":3}"#;
    ok(&["synth", "--spec", spec, "--out", s(&d)]);
    ok(&["assoc", "--input", s(&d), "--json", "--output", s(&m)]);
    let out = ok(&["groups", "--matrix", s(&m)]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let parts: Vec<_> = report["groups"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["members"].clone())
        .collect();
    assert_eq!(parts, vec![serde_json::json!([0, 1, 2]), serde_json::json!([3, 4])]);
    assert_eq!(
        copent(&["synth", "--spec", "{\"kind\":\"nope\"}"]).status.code(),
        Some(1)
    );
}
