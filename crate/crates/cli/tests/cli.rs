use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elliptic-rmatrix")).args(args).output().expect("binary runs")
}

fn run_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elliptic-rmatrix"))
        .args(args)
        .env("ELLIPTIC_RMATRIX_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn parse_c(s: &Value) -> (f64, f64) {
    let z = elliptic_rmatrix::parse_complex(s.as_str().unwrap()).unwrap();
    (z.re, z.im)
}

#[test]
fn list_suites_names_every_suite() {
    let out = run(&["--list-suites"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "quasi-periodicity", "fay", "duality", "projections", "convolution-k0", "convolution-cyl", "shift", "heat", "hhl", "cdybe", "rll",
        "cybe-a", "cybe-b", "cybe-c", "green-series",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn eval_theta_at_zero() {
    let out = run(&["eval", "--kernel", "theta", "--u", "0", "--tau", "i"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(parse_c(&v["value"]), (0.0, 0.0));
    assert_eq!(v["inputs"]["tau"], "0+1i");
}

#[test]
fn eval_g0_matches_library() {
    let out = run(&["eval", "--kernel", "g0", "--w", "0.3-0.1i", "--tau", "0.9i"]);
    assert_eq!(out.status.code(), Some(0));
    let (re, im) = parse_c(&stdout_json(&out)["value"]);
    // mpmath: jtheta(1)' / jtheta(1) at pi w with nome exp(i pi tau), times pi
    assert!((re - 2.025159702153465).abs() < 1e-12 && (im - 1.401548381691185).abs() < 1e-12);
}

#[test]
fn eval_r_elliptic_has_weight_zero_sparsity() {
    let out = run(&["eval", "--kernel", "r_elliptic", "--u", "0.2", "--v", "0", "--lambda", "0.3", "--tau", "i"]);
    assert_eq!(out.status.code(), Some(0));
    let m = stdout_json(&out)["matrix"].clone();
    let nonzero = [(0, 0), (1, 1), (1, 2), (2, 1), (2, 2), (3, 3)];
    for i in 0..4 {
        for j in 0..4 {
            let (re, im) = parse_c(&m[i][j]);
            let zero = re == 0.0 && im == 0.0;
            assert_eq!(zero, !nonzero.contains(&(i, j)), "entry ({i},{j})");
        }
    }
}

#[test]
fn eval_csv_has_re_im_columns() {
    let out = run(&["eval", "--kernel", "g_lambda", "--w", "0.2+0.1i", "--lambda", "0.1-0.3i", "--tau", "i", "--output", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("kernel,re,im\ng_lambda,"));
}

#[test]
fn eval_domain_errors_exit_2() {
    let bad_tau = run(&["eval", "--kernel", "theta", "--u", "0.3", "--tau", "-1i"]);
    assert_eq!(bad_tau.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_tau.stderr).contains("Im(tau)"));
    let strip = run(&["eval", "--kernel", "psi_cth", "--w", "0.2+0.1i", "--eta", "1"]);
    assert_eq!(strip.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&strip.stderr).contains("strip"));
    let missing = run(&["eval", "--kernel", "g0", "--w", "0.1"]);
    assert_eq!(missing.status.code(), Some(2));
    let garbage = run(&["eval", "--kernel", "g0", "--w", "abc", "--tau", "i"]);
    assert_eq!(garbage.status.code(), Some(2));
}

#[test]
fn verify_pass_and_fail_exit_codes() {
    let ok = run(&["verify", "--suite", "cdybe", "--samples", "30", "--seed", "7", "--tol", "1e-8"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout_json(&ok)["passed"], true);
    assert!(String::from_utf8_lossy(&ok.stderr).contains("cdybe"));

    let floor = run(&["verify", "--suite", "cdybe", "--samples", "1", "--seed", "7", "--tol", "1e-20"]);
    assert_eq!(floor.status.code(), Some(1));
    let v = stdout_json(&floor);
    assert_eq!(v["passed"], false);
    assert_eq!(v["failures"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_fay_example() {
    let out = run(&["verify", "--suite", "fay", "--samples", "100", "--seed", "1", "--tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_json_schema_keys() {
    let out = run(&["verify", "--suite", "quasi-periodicity", "--samples", "5"]);
    let v = stdout_json(&out);
    let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(keys, ["failures", "max_residual", "mean_residual", "passed", "samples", "seed", "suite", "tolerance"]);
}

#[test]
fn verify_csv_has_header() {
    let out = run(&["verify", "--suite", "shift", "--samples", "5", "--output", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("suite,seed,samples,tolerance"));
    assert!(lines.next().unwrap().starts_with("shift,0,5,"));
}

#[test]
fn verify_config_errors_exit_2() {
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "fay", "--samples", "0"]).status.code(), Some(2));
    let band = run(&["verify", "--suite", "fay", "--lambda", "0.1-2i", "--tau", "i"]);
    assert_eq!(band.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&band.stderr).contains("band"));
    let no_tau = run(&["verify", "--suite", "fay", "--lambda", "0.1-0.2i"]);
    assert_eq!(no_tau.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "--suite", "convolution-cyl", "--samples", "8", "--seed", "3"];
    let a = run_threads(&args, "1");
    let b = run_threads(&args, "4");
    let c = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn bad_thread_count_exits_2() {
    let out = run_threads(&["--list-suites"], "zero");
    assert_eq!(out.status.code(), Some(2));
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone()).unwrap().lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn degenerate_case_b_rate() {
    let out = run(&["degenerate", "--case", "b", "--scales", "1.5,2,2.5,3"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    let errs: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
    let rate: f64 = rows[0][3].parse().unwrap();
    let target = -2.0 * std::f64::consts::PI;
    assert!(rate / target > 1.0 / 1.5 && rate / target < 1.5, "{rate}");
}

#[test]
fn degenerate_case_a_slope() {
    let out = run(&["degenerate", "--case", "a", "--scales", "10,20,40,80", "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let slope = v[0]["fitted_rate"].as_f64().unwrap();
    assert!((slope + 2.0).abs() < 0.4, "{slope}");
}

#[test]
fn degenerate_case_c_monotone() {
    let out = run(&["degenerate", "--case", "c", "--scales", "10,20,40"]);
    assert_eq!(out.status.code(), Some(0));
    let errs: Vec<f64> = csv_rows(&out).iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn degenerate_rejects_bad_ladders() {
    assert_eq!(run(&["degenerate", "--case", "a", "--scales", "20,10"]).status.code(), Some(2));
    assert_eq!(run(&["degenerate", "--case", "a", "--scales", "10"]).status.code(), Some(2));
}

#[test]
fn average_avctg_decreases() {
    let out = run(&["average", "--identity", "avctg", "--n-list", "1,2,3,4"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    let res: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(res.windows(2).all(|w| w[1] < w[0]), "{res:?}");
    assert!(rows.iter().all(|r| r[2] == "true"));
}

#[test]
fn average_rmatrix_elliptic_at_30() {
    let out = run(&["average", "--identity", "rmatrix-elliptic", "--n-list", "10,20,30", "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v[2]["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn average_rational_to_trig_tail() {
    let out = run(&["average", "--identity", "rational-to-trig", "--n-list", "100,200,400"]);
    let res: Vec<f64> = csv_rows(&out).iter().map(|r| r[1].parse().unwrap()).collect();
    // at mu = 1/2 the alternating tail cancels to second order
    assert!(res.windows(2).all(|w| (w[0] / w[1] - 4.0).abs() < 0.2), "{res:?}");
    let corrected = run(&["average", "--identity", "rational-to-trig", "--n-list", "100", "--tail-correction"]);
    let c: f64 = csv_rows(&corrected)[0][1].parse().unwrap();
    assert!(c < 1e-10);
}

#[test]
fn average_errors_name_band_and_zone() {
    let band = run(&["average", "--identity", "avctg-p", "--n-list", "5", "--lambda", "0.1+0.2i"]);
    assert_eq!(band.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&band.stderr).contains("band"));
    let zone = run(&["average", "--identity", "rational-to-trig", "--n-list", "5", "--mu", "0.5+0.1i", "--eta", "1"]);
    assert_eq!(zone.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&zone.stderr).contains("zone"));
    assert_eq!(run(&["average", "--identity", "avctg", "--n-list", "4,2"]).status.code(), Some(2));
    assert_eq!(run(&["average", "--identity", "bogus", "--n-list", "4"]).status.code(), Some(2));
}

#[test]
fn no_subcommand_exits_2() {
    assert_eq!(run(&[]).status.code(), Some(2));
}
