use std::process::Command;

fn woundcount(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_woundcount"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn count_rows() {
    let (code, out, _) = woundcount(&["count", "--p", "2", "--q", "2", "--m", "0..4"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(
        rows,
        ["0,1,structured", "1,2,structured", "2,2,structured", "3,4,structured", "4,8,structured"]
    );
}

#[test]
fn output_independent_of_workers() {
    for args in [
        &["count", "--p", "3", "--m", "0..7", "--naive"][..],
        &["density", "--p", "2", "--trunc", "3", "--s", "2+3i", "--s", "0.5", "--format", "json"][..],
        &["places", "--p", "3", "--trunc", "3", "--format", "json"][..],
    ] {
        let mut seen = None;
        for workers in ["1", "2", "4"] {
            let mut a = args.to_vec();
            a.extend(["--workers", workers]);
            let (code, out, _) = woundcount(&a);
            assert_eq!(code, 0, "{a:?}");
            match &seen {
                None => seen = Some(out),
                Some(first) => assert_eq!(first, &out, "{a:?}"),
            }
        }
    }
}

#[test]
fn writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("reports/constant");
    let (code, _, _) = woundcount(&["constant", "--p", "3", "--trunc", "12", "--out", base.to_str().unwrap()]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(base.with_extension("csv")).unwrap();
    assert!(csv.starts_with("factor,value\n"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(base.with_extension("json")).unwrap()).unwrap();
    assert!(json["gap"].as_f64().unwrap() <= 1e-6);
    assert!((json["closed_form"].as_f64().unwrap() * 3f64.ln() - 8.0 / 9.0).abs() < 1e-12);
}

#[test]
fn constant_report_at_two() {
    let (code, out, _) = woundcount(&["constant", "--p", "2", "--q", "2", "--trunc", "12", "--format", "json"]);
    assert_eq!(code, 0);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    let gap = json["gap"].as_f64().unwrap();
    assert!(gap <= json["tail_bound"].as_f64().unwrap());
    assert!((json["closed_form"].as_f64().unwrap() * 2f64.ln() - 0.5).abs() < 1e-15);
}

#[test]
fn charsum_value() {
    let (code, out, _) = woundcount(&["charsum", "--qv", "3", "--n", "1", "--d", "1"]);
    assert_eq!(code, 0);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert!((row[4].parse::<f64>().unwrap() + 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn poles_for_twice_rho() {
    let (code, out, _) = woundcount(&["poles", "--p", "2", "--lambda", "2", "--m", "8..9", "--format", "json"]);
    assert_eq!(code, 0);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["structure"]["d"], "2");
    assert_eq!(json["structure"]["poles"].as_array().unwrap().len(), 2);
    assert!((json["predictions"][0]["prediction"].as_f64().unwrap() - 8.0).abs() < 1e-9);
    assert!(json["predictions"][1]["prediction"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn exit_codes() {
    assert_eq!(woundcount(&["count", "--p", "4"]).0, 2);
    assert_eq!(woundcount(&["count", "--m", "x"]).0, 2);
    assert_eq!(woundcount(&["poles", "--lambda", "1/3"]).0, 2);
    assert_eq!(woundcount(&["density", "--place", "1,0,1"]).0, 2);
    let (code, out, err) = woundcount(&["count", "--m", "0..20", "--budget", "1000"]);
    assert_eq!(code, 3);
    assert!(out.lines().count() > 2);
    assert!(err.contains("budget"));
}

#[test]
fn verify_all_reflects_the_suite() {
    let (code, out, _) = woundcount(&["verify-all", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    let criteria = json["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 11);
    let all = criteria.iter().all(|c| c["passed"] == true);
    assert_eq!(json["all_passed"], all);
    assert_eq!(code, if all { 0 } else { 1 });
}
