use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_stardisc");

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str], stdin: &str) -> Run {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_writes_csv_with_header() {
    let r = run(&["gen", "--kind", "halton", "--n", "64", "--d", "2"], "");
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert!(lines[0].starts_with('#'));
    let rows: Vec<&str> = lines
        .iter()
        .copied()
        .filter(|l| !l.starts_with('#'))
        .collect();
    assert_eq!(rows.len(), 64);
    assert_eq!(rows[0], "0.5,0.3333333333333333");
}

#[test]
fn gen_to_file_and_reproducible_random() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("r.csv");
    let r = run(
        &[
            "gen",
            "--kind",
            "random",
            "--n",
            "10",
            "--d",
            "3",
            "--seed",
            "9",
            "--output",
            path(&file),
        ],
        "",
    );
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    let again = run(
        &[
            "gen", "--kind", "random", "--n", "10", "--d", "3", "--seed", "9",
        ],
        "",
    );
    assert_eq!(std::fs::read_to_string(&file).unwrap(), again.stdout);
}

#[test]
fn gen_grid_requires_perfect_power() {
    let r = run(&["gen", "--kind", "grid", "--n", "10", "--d", "2"], "");
    assert_eq!(r.code, 2);
    assert!(
        r.stderr.starts_with("error: --kind/--n/--d:"),
        "{}",
        r.stderr
    );
}

#[test]
fn disc_exact_from_stdin() {
    let r = run(&["disc", "--input", "-"], "0.5,0.5\n");
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    assert_eq!(v["value"], 0.75);
    assert_eq!(v["method"], "exact");
    assert_eq!(v["side"], "overfill");
    assert_eq!(v["argmax_corner"], serde_json::json!([0.5, 0.5]));
}

#[test]
fn gen_pipes_into_disc() {
    let points = run(&["gen", "--kind", "grid", "--n", "16", "--d", "1"], "").stdout;
    let r = run(&["disc", "--input", "-"], &points);
    assert_eq!(r.code, 0);
    assert_eq!(json(&r.stdout)["value"], 1.0 / 32.0);
}

#[test]
fn disc_sampled_is_below_exact() {
    let points = run(
        &[
            "gen", "--kind", "random", "--n", "50", "--d", "3", "--seed", "1",
        ],
        "",
    )
    .stdout;
    let exact = json(&run(&["disc", "--input", "-"], &points).stdout)["value"]
        .as_f64()
        .unwrap();
    let r = run(
        &[
            "disc",
            "--input",
            "-",
            "--method",
            "sample",
            "--samples",
            "500",
            "--seed",
            "4",
        ],
        &points,
    );
    assert_eq!(r.code, 0);
    let v = json(&r.stdout);
    assert_eq!(v["method"], "sampled");
    assert!(v["value"].as_f64().unwrap() <= exact);
}

#[test]
fn disc_reports_grid_cap_and_bad_input() {
    let points = run(&["gen", "--kind", "halton", "--n", "100", "--d", "3"], "").stdout;
    let r = run(&["disc", "--input", "-", "--max-corners", "1000"], &points);
    assert_eq!(r.code, 2);
    assert!(
        r.stderr.starts_with("error: --max-corners:"),
        "{}",
        r.stderr
    );

    let r = run(&["disc", "--input", "-"], "0.5,1.5\n");
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error: --input:"));

    let r = run(&["disc", "--input", "/nonexistent/points.csv"], "");
    assert_eq!(r.code, 2);
}

#[test]
fn certify_single_point_is_refuted() {
    let r = run(
        &["certify", "--input", "-", "--epsilon", "0.01"],
        "0.5,0.5\n",
    );
    assert_eq!(r.code, 3, "{}", r.stderr);
    let v = json(&r.stdout);
    assert_eq!(v["side"], "overfull-inner");
    assert!(v["excess"].as_f64().unwrap() > 0.01);
    assert!(v["outer_counters"].is_array() && v["inner_counters"].is_array());
}

#[test]
fn certify_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("p.csv");
    let cert = dir.path().join("c.json");
    let r = run(
        &[
            "gen",
            "--kind",
            "halton",
            "--n",
            "300",
            "--d",
            "2",
            "--output",
            path(&points),
        ],
        "",
    );
    assert_eq!(r.code, 0);

    let r = run(
        &["certify", "--input", path(&points), "--epsilon", "0.02"],
        "",
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    assert_eq!(v["params"]["a_max"], 2);
    assert!(v["k"].as_u64().unwrap() >= 2);
    std::fs::write(&cert, &r.stdout).unwrap();

    let r = run(
        &[
            "verify",
            "--input",
            path(&points),
            "--certificate",
            path(&cert),
        ],
        "",
    );
    assert_eq!(r.code, 0);
    assert_eq!(
        json(&r.stdout),
        serde_json::json!({"valid": true, "failures": []})
    );

    let mut tampered = v.clone();
    tampered["k"] = serde_json::json!(v["k"].as_u64().unwrap() + 1);
    std::fs::write(&cert, tampered.to_string()).unwrap();
    let r = run(
        &[
            "verify",
            "--input",
            path(&points),
            "--certificate",
            path(&cert),
        ],
        "",
    );
    assert_eq!(r.code, 1);
    let report = json(&r.stdout);
    assert_eq!(report["valid"], false);
    assert!(!report["failures"].as_array().unwrap().is_empty());

    std::fs::write(&cert, "{not json").unwrap();
    let r = run(
        &[
            "verify",
            "--input",
            path(&points),
            "--certificate",
            path(&cert),
        ],
        "",
    );
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error: --certificate:"));
}

#[test]
fn gen_pipes_into_certify() {
    let points = run(&["gen", "--kind", "grid", "--n", "1600", "--d", "2"], "").stdout;
    let r = run(&["certify", "--input", "-", "--epsilon", "0.05"], &points);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stderr.contains("certificate"));
}

#[test]
fn certify_rejects_bad_parameters() {
    let r = run(
        &[
            "certify",
            "--input",
            "-",
            "--epsilon",
            "0.01",
            "--beta",
            "4",
        ],
        "0.5,0.5\n",
    );
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error: --beta:"), "{}", r.stderr);

    let r = run(&["certify", "--input", "-", "--epsilon", "0"], "0.5,0.5\n");
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error: --epsilon:"));

    let r = run(&["certify", "--input", "-", "--epsilon", "0.01"], "0.5\n");
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error: --input:"));
}

#[test]
fn bench_csv_and_json() {
    let args = [
        "bench",
        "--d",
        "2",
        "--epsilon",
        "0.25",
        "--generators",
        "grid",
        "--n-grid",
        "1,4,16",
    ];
    let r = run(&args, "");
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("d,epsilon,beta,lower_bound_chain"));
    assert_eq!(lines[1], "2,0.25,20.0,0,320.0,79.8976,16,grid,true,false");

    let mut json_args = args.to_vec();
    json_args.push("--json");
    let v = json(&run(&json_args, "").stdout);
    assert_eq!(v[0]["best_n_found"], 16);
    assert_eq!(v[0]["certified"], true);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[], "").code, 2);
    assert_eq!(
        run(&["gen", "--kind", "sobol", "--n", "4", "--d", "2"], "").code,
        2
    );
    assert_eq!(
        run(&["--threads", "0", "disc", "--input", "-"], "0.5\n").code,
        2
    );
    assert_eq!(run(&["--help"], "").code, 0);
}
