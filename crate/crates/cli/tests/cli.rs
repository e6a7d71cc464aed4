use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bellbox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellbox"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn uniform_box_json() -> String {
    let block = r#"{"pp":0.25,"pm":0.25,"mp":0.25,"mm":0.25}"#;
    let pairs: Vec<String> = ["XX", "XY", "XZ", "YX", "YY", "YZ", "ZX", "ZY", "ZZ"]
        .iter()
        .map(|k| format!("\"{k}\":{block}"))
        .collect();
    format!("{{\"blocks\":{{{}}}}}", pairs.join(","))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn validate_uniform_box_at_level_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "u.json", &uniform_box_json());
    let o = bellbox(&["validate", &path, "--level", "3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn validate_even_parity_box_fails_level_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = uniform_box_json().replace(
        r#"{"pp":0.25,"pm":0.25,"mp":0.25,"mm":0.25}"#,
        r#"{"pp":0.5,"pm":0.0,"mp":0.0,"mm":0.5}"#,
    );
    let path = write(dir.path(), "even.json", &text);
    let o = bellbox(&["validate", &path, "--level", "2", "--json"]);
    assert_eq!(code(&o), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let p4 = report["bell_probabilities"][3].as_f64().unwrap();
    assert!((p4 + 0.5).abs() < 1e-12);
    assert_eq!(report["passed"], false);
    assert_eq!(report["steered"].as_array().unwrap().len(), 12);
}

#[test]
fn validate_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{not json");
    assert_eq!(code(&bellbox(&["validate", &bad])), 2);
    let missing = write(dir.path(), "m.json", r#"{"blocks":{}}"#);
    assert_eq!(code(&bellbox(&["validate", &missing])), 2);
    assert_eq!(code(&bellbox(&["validate", "/no/such/file.json"])), 2);
}

#[test]
fn scan_ball_rows_and_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ball.csv");
    let o = bellbox(&[
        "scan-ball",
        "--lambda",
        "0.25",
        "--grid",
        "41",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(
        text.lines().filter(|l| !l.starts_with('#')).count(),
        41 * 41 * 41
    );

    let o = bellbox(&["scan-ball", "--lambda", "0", "--grid", "41"]);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "0.5,0.5,0.5,1"));
    assert!(text.lines().any(|l| l == "1,1,1,0"));
}

#[test]
fn scan_ball_slice() {
    let o = bellbox(&["scan-ball", "--grid", "5", "--slice", "z=0.5"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<_> = stdout(&o).lines().skip(1).map(str::to_owned).collect();
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().any(|l| l == "0.5,0.5,1"));
    assert_eq!(code(&bellbox(&["scan-ball", "--slice", "x=0.5"])), 2);
}

#[test]
fn scan_lh_examples() {
    let text = stdout(&bellbox(&["scan-lh", "--alpha", "0", "--grid", "101"]));
    assert!(text.lines().any(|l| l == "0,0.7,1"));
    assert!(text.lines().any(|l| l == "1,0.1,0"));

    let text = stdout(&bellbox(&[
        "scan-lh",
        "--alpha",
        "0.7853981633974483",
        "--grid",
        "21",
    ]));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",1")));

    let by_k = stdout(&bellbox(&[
        "scan-lh",
        "--alpha-sixteenths",
        "2",
        "--grid",
        "21",
    ]));
    let by_rad = stdout(&bellbox(&[
        "scan-lh",
        "--alpha",
        &(std::f64::consts::PI / 8.0).to_string(),
        "--grid",
        "21",
    ]));
    assert_eq!(
        by_k.lines().skip(1).collect::<Vec<_>>(),
        by_rad.lines().skip(1).collect::<Vec<_>>()
    );
}

#[test]
fn scans_are_deterministic() {
    let a = bellbox(&["scan-ball", "--lambda", "0.5", "--grid", "21"]);
    let b = bellbox(&["scan-ball", "--lambda", "0.5", "--grid", "21"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unwritable_output_is_an_input_error() {
    let o = bellbox(&[
        "scan-lh",
        "--alpha",
        "0",
        "--grid",
        "5",
        "--out",
        "/no/such/dir/x.csv",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn chsh_exact_levels_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let witness = dir.path().join("w.json");
    let w = witness.to_str().unwrap();
    for level in ["1", "2"] {
        let o = bellbox(&[
            "chsh",
            "--exact",
            "--level",
            level,
            "--a1",
            "X",
            "--a2",
            "Z",
            "--b1",
            "X",
            "--b2",
            "Z",
            "--witness",
            w,
        ]);
        assert_eq!(code(&o), 0);
        assert!(stdout(&o).contains("4.000000000000"), "{}", stdout(&o));
    }
    assert_eq!(code(&bellbox(&["validate", w, "--level", "2"])), 0);
    assert_eq!(code(&bellbox(&["validate", w, "--level", "3"])), 1);
}

#[test]
fn chsh_sampled_level_three_respects_tsirelson() {
    let dir = tempfile::tempdir().unwrap();
    let witness = dir.path().join("w.json");
    let o = bellbox(&[
        "chsh",
        "--level",
        "3",
        "--a1",
        "X",
        "--a2",
        "Z",
        "--b1",
        "X",
        "--b2",
        "Z",
        "--trials",
        "10000",
        "--seed",
        "3",
        "--witness",
        witness.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let value: f64 = stdout(&o)
        .trim()
        .rsplit(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(value <= 2.8285, "{value}");
    assert_eq!(
        code(&bellbox(&[
            "validate",
            witness.to_str().unwrap(),
            "--level",
            "3"
        ])),
        0
    );
}

#[test]
fn chsh_rejects_bad_flag_combinations() {
    let base = ["chsh", "--a1", "X", "--a2", "Z", "--b1", "X", "--b2", "Z"];
    let with = |extra: &[&str]| {
        let mut v: Vec<&str> = base.to_vec();
        v.extend_from_slice(extra);
        code(&bellbox(&v))
    };
    assert_eq!(with(&["--level", "3", "--exact"]), 2);
    assert_eq!(with(&["--level", "2", "--trials", "10"]), 2);
    assert_eq!(with(&["--level", "3"]), 2);
    assert_eq!(with(&["--level", "4", "--exact"]), 2);
    let o = bellbox(&[
        "chsh", "--exact", "--level", "2", "--a1", "X", "--a2", "X", "--b1", "X", "--b2", "Z",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn oracle_passes_and_forced_failure() {
    let o = bellbox(&["oracle", "--samples", "1000", "--seed", "0", "--json"]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["max_bell_residual"].as_f64().unwrap() < 1e-12);

    let o = bellbox(&["oracle", "--samples", "1", "--tol", "1e-20"]);
    assert_eq!(code(&o), 1);
}
