use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercubic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn count_json_example() {
    let o = run(&["count", "--surface", "threefold", "--bound", "1", "--method", "fiber", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "{\"surface\":\"threefold\",\"B\":1,\"method\":\"fiber\",\"count\":2}\n");
}

#[test]
fn cayley_brute_count_and_key_order() {
    let o = run(&["count", "--surface", "cayley", "--a", "2", "--bound", "1", "--method", "brute", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "{\"surface\":\"cayley\",\"a\":2,\"B\":1,\"method\":\"brute\",\"count\":2}\n"
    );
}

#[test]
fn non_squarefree_a_is_a_usage_error() {
    let o = run(&["count", "--surface", "cayley", "--a", "4", "--bound", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("a must be squarefree"));
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["count", "--surface", "threefold"],
        vec!["count", "--bound", "5"],
        vec!["count", "--surface", "cayley", "--bound", "5"],
        vec!["count", "--surface", "cayley", "--a", "0", "--bound", "5"],
        vec!["count", "--surface", "threefold", "--a", "2", "--bound", "5"],
        vec!["count", "--surface", "threefold", "--bound", "0"],
        vec!["count", "--surface", "threefold", "--bound", "-3"],
        vec!["count", "--surface", "threefold", "--bound", "x"],
        vec!["count", "--surface", "threefold", "--bound", "31", "--method", "brute"],
        vec!["count", "--surface", "cayley", "--a", "2", "--bound", "81", "--method", "brute"],
        vec!["constant", "--surface", "threefold", "--radius", "0"],
        vec!["tamagawa", "--mu", "2", "--lambda", "4"],
        vec!["tamagawa", "--mu", "0", "--lambda", "0"],
        vec!["tamagawa", "--primes", "1"],
        vec!["tamagawa", "--quad-tol", "-1"],
        vec!["verify", "--suite", "nonsense"],
        vec!["count", "--surface", "threefold", "--bound", "2", "--threads", "0"],
        vec!["frobnicate"],
        vec![],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 2, "{args:?}");
    }
}

#[test]
fn help_exits_0() {
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn cross_method_check_agrees() {
    let o = run(&["count", "--surface", "cayley", "--a", "-30", "--bounds", "12,3", "--check", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "surface,a,B,method,count,check_count");
    assert!(lines[1].starts_with("cayley,-30,3,fiber,"));
    assert!(lines[2].starts_with("cayley,-30,12,fiber,"));
    for l in &lines[1..] {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f[4], f[5]);
    }
}

#[test]
fn constant_examples() {
    let o = run(&["constant", "--surface", "threefold", "--radius", "1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("series partial sum: 4\n"), "{out}");
    assert!(out.contains("constant: 3.48468545356 +- "), "{out}");

    let o = run(&["constant", "--surface", "cayley", "--a", "2", "--radius", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["partial_sum"], 2.0);
    assert!((v["constant"].as_f64().unwrap() - 9.0 / std::f64::consts::PI).abs() < 1e-15);
}

#[test]
fn constant_halving_table_has_shrinking_tails() {
    let o = run(&["constant", "--surface", "cayley", "--a", "-5", "--radius", "64", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let tails: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(5).unwrap().parse().unwrap()).collect();
    assert_eq!(tails.len(), 7);
    assert!(tails.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn converge_csv_schema() {
    let o = run(&["converge", "--surface", "threefold", "--bounds", "100,1,200", "--radius", "200"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(!out.contains('\r'));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "surface,a,B,count,predicted,rel_error");
    assert_eq!(lines.len(), 4);
    let rows: Vec<Vec<&str>> = lines[1..].iter().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0][..4], ["threefold", "", "1", "2"]);
    assert_eq!(rows[1][2], "100");
    assert_eq!(rows[2][2], "200");
    for r in &rows {
        assert_eq!(r.len(), 6);
        let e: f64 = r[5].parse().unwrap();
        assert!(e >= 0.0);
        // 12 significant digits at most
        assert!(r[4].chars().filter(|c| c.is_ascii_digit()).count() <= 12);
    }
}

#[test]
fn converge_cayley_has_a_column() {
    let o = run(&["converge", "--surface", "cayley", "--a", "2", "--bound", "50", "--radius", "100"]);
    let out = stdout(&o);
    assert!(out.lines().nth(1).unwrap().starts_with("cayley,2,50,"), "{out}");
}

#[test]
fn tamagawa_examples() {
    let o = run(&["tamagawa", "--primes", "3"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("p = 2: 7/4"));
    assert!(out.contains("p = 3: 13/9"));
    assert!(!out.contains("p = 5"));
    assert!(out.contains("omega_inf closed form: 6.28318530718"));
    assert!(out.contains("tau_L = omega_inf / zeta(3) = 5.22702818033"));
    assert!(out.lines().last().unwrap().ends_with("PASS"));
}

#[test]
fn verify_identities_passes() {
    let o = run(&["verify", "--suite", "identities"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("identities: PASS\n"));
    assert!(out.contains("4*t0^2*t3 + 4*t1^2*t2"));
    // timing goes to stderr only
    assert!(String::from_utf8_lossy(&o.stderr).contains("identities: "));
}

#[test]
fn json_round_trips_byte_for_byte() {
    for args in [
        vec!["count", "--surface", "cayley", "--a", "-5", "--bounds", "3,9", "--format", "json"],
        vec!["constant", "--surface", "threefold", "--radius", "20", "--format", "json"],
        vec!["converge", "--surface", "threefold", "--bounds", "5,10", "--format", "json"],
        vec!["tamagawa", "--primes", "20", "--mu", "5", "--lambda", "-7", "--format", "json"],
        vec!["verify", "--suite", "series-cauchy", "--format", "json"],
    ] {
        let out = stdout(&run(&args));
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let again = serde_json::to_string(&v).unwrap() + "\n";
        assert_eq!(out, again, "{args:?}");
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    for args in [
        vec!["converge", "--surface", "threefold", "--bounds", "40,80", "--radius", "300"],
        vec!["constant", "--surface", "cayley", "--a", "-2", "--radius", "300", "--format", "json"],
        vec!["count", "--surface", "cayley", "--a", "6", "--bound", "25", "--method", "brute"],
    ] {
        let base = stdout(&run(&args));
        for t in ["1", "3"] {
            let mut with = args.clone();
            with.extend(["--threads", t]);
            assert_eq!(stdout(&run(&with)), base, "{with:?}");
        }
        assert_eq!(stdout(&run(&args)), base);
    }
}

#[test]
fn out_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("hypercubic-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("count.json");
    let o = run(&[
        "count", "--surface", "threefold", "--bound", "1", "--format", "json", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        "{\"surface\":\"threefold\",\"B\":1,\"method\":\"fiber\",\"count\":2}\n"
    );
    std::fs::remove_dir_all(&dir).unwrap();
}
