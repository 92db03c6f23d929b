use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gonosomal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
}

fn last_row(csv: &str) -> Vec<f64> {
    let row = csv.lines().rev().find(|l| !l.starts_with('#')).unwrap();
    row.split(',').map(|v| v.parse().unwrap()).collect()
}

fn trailer(csv: &str) -> &str {
    csv.lines()
        .find_map(|l| l.strip_prefix("# stop_reason="))
        .unwrap()
}

#[test]
fn raw_fixed_points_are_two_records() {
    let o = run(&["fixed-points"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let points: Vec<&str> = text.lines().filter(|l| l.starts_with("point=")).collect();
    assert_eq!(points.len(), 2, "{text}");
    assert_eq!(points[0], "point=0.0,0.0,0.0,0.0");
    let classes: Vec<&str> = text
        .lines()
        .filter_map(|l| l.strip_prefix("classification="))
        .collect();
    assert_eq!(classes, ["Attracting", "NonHyperbolic"]);
    assert!(
        text.contains("\n\npoint="),
        "records are blank-line separated"
    );
}

#[test]
fn normalized_fixed_point_is_unique() {
    let o = run(&["fixed-points", "--mode", "normalized"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let point: Vec<f64> = field(&text, "point")
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(text.matches("point=").count(), 1);
    for (a, b) in point.iter().zip([0.5, 0.0, 0.5, 0.0]) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn invalid_tensor_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(
        &path,
        "2 2\n0.5 0 0.4 0\n0 0.5 0.5 0\n1/4 1/4 1/4 1/4\n0 1/3 1/3 1/3\n",
    )
    .unwrap();
    let o = run(&["fixed-points", "--tensor", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sums to 0.9"));

    let o = run(&[
        "fixed-points",
        "--tensor",
        dir.path().join("missing").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tensor_file_matching_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hemophilia.txt");
    fs::write(
        &path,
        "# hemophilia\n2 2 normalized\n1/2 0 1/2 0\n0 1/2 1/2 0\n1/4 1/4 1/4 1/4\n0 1/3 1/3 1/3\n",
    )
    .unwrap();
    let from_file = run(&[
        "classify",
        "--state",
        "1,1,1,1",
        "--tensor",
        path.to_str().unwrap(),
    ]);
    assert!(from_file.status.success());
    assert_eq!(
        stdout(&from_file),
        stdout(&run(&["classify", "--state", "1,1,1,1"]))
    );
}

#[test]
fn raw_trajectories() {
    let o = run(&["trajectory", "--state", "1,0,1,0"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert_eq!(csv.lines().next(), Some("step,x,y,u,v,sum,(x+y)(u+v)"));
    assert_eq!(trailer(&csv), "ConvergedToPoint");
    assert!(last_row(&csv)[1..5].iter().all(|v| v.abs() < 1e-10));

    let csv = stdout(&run(&["trajectory", "--state", "3,0,3,0"]));
    assert_eq!(trailer(&csv), "Diverged");
}

#[test]
fn sum_column_tracks_previous_product() {
    let csv = stdout(&run(&["trajectory", "--state", "1,1,1,1", "--budget", "5"]));
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows[0][5], 4.0);
    for w in rows.windows(2) {
        assert!((w[1][5] - w[0][6]).abs() < 1e-12);
    }
}

// Convergence to p is algebraic (the unit eigenvalue lies in the (y, v)
// block), so a 10_000-step run ends a few 1e-4 away rather than within 1e-8.
#[test]
fn normalized_trajectory_approaches_p() {
    let o = run(&[
        "trajectory",
        "--mode",
        "normalized",
        "--state",
        "0.25,0.25,0.25,0.25",
    ]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert_eq!(trailer(&csv), "BudgetExhausted");
    let last = last_row(&csv);
    let distance = last[1..5]
        .iter()
        .zip([0.5, 0.0, 0.5, 0.0])
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(distance < 1e-3, "{distance}");
    assert!((last[5] - 1.0).abs() < 1e-12);
}

#[test]
fn normalized_trajectory_needs_simplex_state() {
    let o = run(&["trajectory", "--mode", "normalized", "--state", "1,1,1,1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["trajectory", "--state", "1,1,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classify_examples() {
    let text = stdout(&run(&["classify", "--state", "1,1,1,1"]));
    assert_eq!(field(&text, "kind"), Some("Zero"));
    assert_eq!(field(&text, "rule"), Some("(i)-2"));
    assert_eq!(field(&text, "witness"), Some("k=0"));

    let text = stdout(&run(&["classify", "--state", "5,5,5,5"]));
    assert_eq!(field(&text, "kind"), Some("Infinity"));
    assert_eq!(field(&text, "rule"), Some("(ii)-a"));
    assert_eq!(field(&text, "witness"), Some("xu/4=6.25"));

    let o = run(&["classify", "--state", "0.1,-0.1,3,3", "--empirical"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(field(&text, "kind"), Some("Undecided"));
    assert_eq!(field(&text, "rule"), None);
    assert!(field(&text, "empirical.kind").is_some());
}

#[test]
fn classify_empirical_agrees() {
    for state in ["1,1,1,1", "2,0,2,0", "-1,0,-3,0", "3,0,3,0"] {
        let o = run(&["classify", "--state", state, "--empirical"]);
        assert!(o.status.success(), "{state}");
        assert_eq!(field(&stdout(&o), "empirical.agrees"), Some("true"));
    }
}

#[test]
fn classify_rejects_normalized_mode() {
    let o = run(&[
        "classify",
        "--mode",
        "normalized",
        "--state",
        "0.25,0.25,0.25,0.25",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_and_flags_only_the_stated_contraction() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for p in [&a, &b] {
        let o = run(&[
            "verify",
            "--samples",
            "500",
            "--seed",
            "9",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(1));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());

    let failing: Vec<&str> = text
        .split("\n\n")
        .filter(|stanza| stanza.contains("status=FAIL") && stanza.contains("clause="))
        .filter_map(|stanza| field(stanza, "clause"))
        .collect();
    assert_eq!(failing, ["v(n+1) <= 13/24 y(n), n >= 2"]);
}

#[test]
fn verify_flags_a_corrupted_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(
        &path,
        "2 2\n0.5 0 0.4 0\n0 0.5 0.5 0\n1/4 1/4 1/4 1/4\n0 1/3 1/3 1/3\n",
    )
    .unwrap();
    let o = run(&["verify", "--tensor", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert_eq!(field(&text, "clause"), Some("tensor validation"));
}

#[test]
fn verify_passes_for_a_generic_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.txt");
    fs::write(&path, "1 2\n0.2 0.3 0.5\n0.6 0.1 0.3\n").unwrap();
    let o = run(&[
        "verify",
        "--samples",
        "300",
        "--tensor",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn scan_from_p_lands_in_bucket_zero() {
    let o = run(&["scan", "--mode", "normalized", "--state", "0.5,0,0.5,0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(field(&text, "converged"), Some("1"));
    assert!(text.contains("bucket,0,9,1,,"));
}

#[test]
fn scan_histogram_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let tables: Vec<String> = ["a.csv", "b.csv"]
        .iter()
        .map(|name| {
            let table = dir.path().join(name);
            let o = run(&[
                "scan",
                "--mode",
                "normalized",
                "--samples",
                "300",
                "--tol",
                "1e-2",
                "--budget",
                "500",
                "--seed",
                "3",
                "--table",
                table.to_str().unwrap(),
            ]);
            assert!(o.status.success(), "{}", stdout(&o));
            fs::read_to_string(table).unwrap()
        })
        .collect();
    assert_eq!(tables[0], tables[1]);
    assert!(tables[0].starts_with("kind,steps_lo,steps_hi,count,start,reason\nbucket,"));
}

#[test]
fn scan_requires_normalized_mode() {
    assert_eq!(run(&["scan"]).status.code(), Some(2));
}
