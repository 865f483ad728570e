use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sns(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sns"))
        .args(args)
        .env_remove("SNS_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn meta(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("meta.json")).unwrap()).unwrap()
}

const DISCRETE: [&str; 9] = ["--model", "discrete", "--n", "5", "--beta-a", "0.5", "--beta-b", "0.75", "--seed"];

#[test]
fn simulate_is_byte_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let dir = tmp.path().join(name);
        let mut args = vec!["simulate"];
        args.extend(DISCRETE);
        args.extend(["42", "--t-max", "2e3", "--replicas", "3", "--threads", threads, "--output-dir"]);
        args.push(dir.to_str().unwrap());
        let out = sns(&args);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        dir
    };
    let a = run("a", "1");
    let b = run("b", "3");
    let files = read_dir_sorted(&a);
    let names: Vec<_> = files.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(names, ["covariance.csv", "histograms.csv", "meta.json", "profile.csv", "stats.json"]);
    assert_eq!(files, read_dir_sorted(&b));
    assert_eq!(meta(&a)["streams"], serde_json::json!([0, 1, 2]));
    assert_eq!(meta(&a)["config"]["seed"], 42);
    for (name, bytes) in files.iter().filter(|f| f.0.ends_with(".csv")) {
        assert!(bytes.starts_with(b"# config: {"), "{name}");
    }
}

#[test]
fn different_seeds_differ() {
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for seed in ["1", "2"] {
        let dir = tmp.path().join(seed);
        let mut args = vec!["simulate"];
        args.extend(DISCRETE);
        args.extend([seed, "--t-max", "500", "--output-dir", dir.to_str().unwrap()]);
        assert_eq!(code(&sns(&args)), 0);
        outputs.push(fs::read_to_string(dir.join("profile.csv")).unwrap());
    }
    let body = |s: &String| s.lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_ne!(body(&outputs[0]), body(&outputs[1]));
}

#[test]
fn continuous_run_records_epsilon() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("c");
    let out = sns(&[
        "simulate", "--model", "continuous", "--n", "3", "--t-a", "1", "--t-b", "2", "--epsilon", "1e-5", "--t-max", "100",
        "--output-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let m = meta(&dir);
    assert_eq!(m["config"]["epsilon"], 1e-5);
    assert_eq!(m["continuous"]["epsilon"], 1e-5);
    assert!(m["continuous"]["bias_note"].as_str().unwrap().contains("1e-5"));
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("run.cfg");
    fs::write(&file, "# sweep point\nmodel = discrete\nn = 2\nbeta_a = 0.3\nbeta-b = 0.6\nt-max = 300\nseed = 9\n").unwrap();
    let dir = tmp.path().join("out");
    let out = sns(&["simulate", "--config", file.to_str().unwrap(), "--n", "3", "--output-dir", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let cfg = &meta(&dir)["config"];
    assert_eq!(cfg["n"], 3);
    assert_eq!(cfg["beta_a"], 0.3);
    assert_eq!(cfg["seed"], 9);
}

#[test]
fn output_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sns"))
        .args(["verify", "--suite", "identities"])
        .env("SNS_OUTPUT_DIR", tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(tmp.path().join("reports.jsonl").exists());
}

#[test]
fn config_errors_exit_2_and_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let cases: [(&[&str], &str); 5] = [
        (&["simulate", "--model", "discrete", "--n", "2", "--beta-a", "0.9", "--beta-b", "0.5", "--t-max", "10", "--output-dir", dir], "beta_a"),
        (&["simulate", "--model", "discrete", "--n", "2", "--beta-a", "0.3", "--beta-b", "0.5", "--output-dir", dir], "t-max"),
        (&["simulate", "--model", "lattice", "--n", "2", "--t-max", "10", "--output-dir", dir], "model"),
        (&["sample-exact", "--model", "continuous", "--n", "2", "--t-a", "1", "--output-dir", dir], "t-b"),
        (&["verify", "--suite", "everything", "--output-dir", dir], "suite"),
    ];
    for (args, field) in cases {
        let out = sns(args);
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(code(&out), 2, "{args:?}: {err}");
        assert!(err.contains(field), "{args:?}: {err}");
    }
    let missing = sns(&["simulate", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn verify_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let pass = sns(&["verify", "--suite", "stationarity", "--n", "1", "--k", "200", "--output-dir", dir]);
    assert_eq!(code(&pass), 0);
    let text = fs::read_to_string(tmp.path().join("reports.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["config"]["suite"], "stationarity");
    assert_eq!(lines[1]["verdict"], "pass");
    assert!(lines[1]["max_residual"].as_f64().unwrap() < 1e-8);

    let inconclusive = sns(&["verify", "--suite", "stationarity", "--n", "1", "--k", "5", "--output-dir", dir]);
    assert_eq!(code(&inconclusive), 4);
    // roundoff alone exceeds this tolerance
    let fail = sns(&["verify", "--suite", "stationarity", "--n", "1", "--k", "200", "--tol", "1e-18", "--output-dir", dir]);
    assert_eq!(code(&fail), 3);
    let tele = sns(&["verify", "--suite", "telescoping", "--n", "3", "--output-dir", dir]);
    assert_eq!(code(&tele), 0);
}

#[test]
fn sample_exact_is_reproducible_and_consistent() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let dir = tmp.path().join(name);
        let out = sns(&[
            "sample-exact", "--model", "discrete", "--n", "3", "--beta-a", "0.5", "--beta-b", "0.75", "--samples", "20000",
            "--seed", "5", "--output-dir", dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        dir
    };
    let a = run("a");
    assert_eq!(read_dir_sorted(&a), read_dir_sorted(&run("b")));
    let samples = fs::read_to_string(a.join("samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 2 + 20000);
    let m = meta(&a);
    assert!(m["max_abs_mean_z"].as_f64().unwrap() < 4.0);
    assert_eq!(m["gof_passes"], true);
}

#[test]
fn equilibrium_samples_are_geometric() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("eq");
    let out = sns(&[
        "sample-exact", "--model", "discrete", "--n", "4", "--beta-a", "0.6", "--beta-b", "0.6", "--samples", "50000",
        "--output-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    // oracle: Geometric(rho) frequencies with rho = beta/(1-beta) = 1.5
    let rho: f64 = 1.5;
    let samples = fs::read_to_string(dir.join("samples.csv")).unwrap();
    let mut counts = [0usize; 4];
    let mut total = 0usize;
    for line in samples.lines().skip(2) {
        for v in line.split(',') {
            let k: usize = v.parse().unwrap();
            counts[k.min(3)] += 1;
            total += 1;
        }
    }
    for (k, c) in counts.iter().take(3).enumerate() {
        let p = (rho / (1.0 + rho)).powi(k as i32) / (1.0 + rho);
        let se = (p * (1.0 - p) / total as f64).sqrt();
        assert!(((*c as f64 / total as f64) - p).abs() < 4.5 * se, "k={k}");
    }
    assert_eq!(meta(&dir)["gof_passes"], true);
}

#[test]
fn compare_round_trip_and_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("sim");
    let mut args = vec!["simulate"];
    args.extend(DISCRETE);
    args.extend(["3", "--t-max", "2e4", "--output-dir", dir.to_str().unwrap()]);
    assert_eq!(code(&sns(&args)), 0);
    let out = sns(&["compare", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(dir.join("gof.csv").exists());
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("compare.json")).unwrap()).unwrap();
    assert_eq!(summary["verdict"], "pass");
    assert_eq!(summary["config"]["source"]["seed"], 3);

    assert_eq!(code(&sns(&["compare", tmp.path().join("absent").to_str().unwrap()])), 2);

    // a readable config with unreadable statistics is a runtime failure
    let stats = fs::read_to_string(dir.join("stats.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&stats).unwrap();
    v["stats"] = serde_json::json!("garbage");
    fs::write(dir.join("stats.json"), v.to_string()).unwrap();
    assert_eq!(code(&sns(&["compare", dir.to_str().unwrap()])), 1);
}
