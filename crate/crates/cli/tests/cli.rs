use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_weyl-spectra"));
    cmd.args(args).env_remove("WEYL_SPECTRA_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: [&str; 6] = ["--points", "2", "--vectors", "24", "--planes", "24"];

fn probe_args<'a>(extra: &[&'a str]) -> Vec<&'a str> {
    let mut args = vec!["probe"];
    args.extend_from_slice(extra);
    args.extend_from_slice(&SMALL);
    args
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(
        dir.path(),
        "zero.json",
        r#"{"dim":3,"signature":[0,3],"gram":[[1,0,0],[0,1,0],[0,0,1]],"components":[]}"#,
    );
    // A(1,0,0,1) must be -A(0,1,0,1)
    let broken = write(
        dir.path(),
        "broken.json",
        r#"{"dim":3,"signature":[0,3],"gram":[[1,0,0],[0,1,0],[0,0,1]],"components":[[0,1,0,1,1.0],[1,0,0,1,1.0]]}"#,
    );
    let garbage = write(dir.path(), "garbage.json", "{\"dim\": 3,");
    let ok = run(&["validate", "--tensor", &zero]);
    assert_eq!(code(&ok), 0);
    assert_eq!(json(&ok)["verdict"], "pass");
    let bad = run(&["validate", "--tensor", &broken]);
    assert_eq!(code(&bad), 1);
    let report = json(&bad);
    assert_eq!(report["verdict"], "fail");
    assert_eq!(report["measured"]["antisymmetry"], 2.0);
    assert_eq!(code(&run(&["validate", "--tensor", &garbage])), 2);
    assert_eq!(code(&run(&["validate", "--tensor", "/nonexistent/t.json"])), 2);
}

#[test]
fn probe_exit_codes() {
    let holds = run(&probe_args(&["--family", "gf:p=3,f=sum_sq", "--property", "osserman", "--kind", "spacelike"]));
    assert_eq!(code(&holds), 0, "{}", String::from_utf8_lossy(&holds.stderr));
    assert_eq!(json(&holds)["measured"]["holds"], "true");

    let fails = run(&probe_args(&["--family", "gF:s=2,f=quartic", "--property", "ip", "--kind", "timelike"]));
    assert_eq!(code(&fails), 1);
    let report = json(&fails);
    assert_eq!(report["verdict"], "fail");
    assert!(!report["witnesses"].as_array().unwrap().is_empty());

    let flat = run(&probe_args(&["--family", "flat:m=4,p=2", "--property", "ip"]));
    assert_eq!(code(&flat), 0);

    assert_eq!(code(&run(&probe_args(&["--family", "nosuch:m=3"]))), 2);
    // a Riemannian metric has no timelike vectors
    assert_eq!(code(&run(&probe_args(&["--family", "flat:m=3", "--kind", "timelike"]))), 2);
}

#[test]
fn probe_needs_exactly_one_source() {
    assert_eq!(code(&run(&["probe"])), 2);
    assert_eq!(code(&run(&["probe", "--family", "flat:m=3", "--tensor", "x.json"])), 2);
}

#[test]
fn weyl_dump_round_trips_through_probe() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.json");
    let out = out.to_str().unwrap();
    let one = ["--points", "1", "--vectors", "24", "--planes", "24"];
    for family in ["gf:p=3,f=indef", "gF:s=2,f=quartic"] {
        // the dump is taken at the first sampled point, which is also the
        // only point the family probe visits
        let mut dump = vec!["manifold", "--family", family, "--emit", "weyl", "--out", out];
        dump.extend_from_slice(&one);
        assert_eq!(code(&run(&dump)), 0);
        assert_eq!(code(&run(&["validate", "--tensor", out])), 0);
        for property in ["osserman", "ip"] {
            for kind in ["spacelike", "timelike"] {
                let mut from_file = vec!["probe", "--tensor", out, "--property", property, "--kind", kind];
                from_file.extend_from_slice(&one);
                let mut from_family = vec!["probe", "--family", family, "--property", property, "--kind", kind];
                from_family.extend_from_slice(&one);
                let (a, b) = (run(&from_file), run(&from_family));
                assert_eq!(code(&a), code(&b), "{family} {property} {kind}");
                let (a, b) = (json(&a), json(&b));
                assert_eq!(a["measured"]["holds"], b["measured"]["holds"]);
                assert_eq!(
                    a["measured"]["reference"]["overall_rank_chain"],
                    b["measured"]["reference"]["overall_rank_chain"]
                );
            }
        }
    }
}

#[test]
fn verify_single_job_is_deterministic() {
    let a = run(&["verify", "--only", "T2.1"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    let b = run(&["verify", "--only", "T2.1"]);
    assert_eq!(a.stdout, b.stdout);
    let suite = json(&a);
    let jobs = suite["jobs"].as_array().unwrap();
    assert_eq!(jobs.len(), 1);
    assert_eq!(jobs[0]["job"], "T2.1");
    for key in ["job", "claim", "paper_ref", "samples", "measured", "tolerance", "verdict", "witnesses"] {
        assert!(jobs[0].get(key).is_some(), "missing {key}");
    }
    assert_eq!(code(&run(&["verify", "--only", "T9.9"])), 2);
}

#[test]
fn seed_comes_from_flag_or_environment() {
    let env = run_env(&["verify", "--only", "T2.2"], &[("WEYL_SPECTRA_SEED", "0x2a")]);
    assert_eq!(json(&env)["config"]["seed"], 42);
    let flag = run_env(&["verify", "--only", "T2.2", "--seed", "7"], &[("WEYL_SPECTRA_SEED", "0x2a")]);
    assert_eq!(json(&flag)["config"]["seed"], 7);
    assert_eq!(code(&run(&["verify", "--only", "T2.2", "--seed", "nope"])), 2);
}

#[test]
fn csv_output_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.csv");
    let path = path.to_str().unwrap();
    let out = run(&["probe", "--family", "gf:p=3,f=sum_sq", "--format", "csv", "--out", path, "--points", "1", "--vectors", "5"]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "point,coordinates,index,source,vector,plane_e1,plane_e2,clusters,rank_chain,error"
    );
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.starts_with("0,")));

    let jobs = run(&["verify", "--only", "T2.1", "--format", "csv"]);
    let text = String::from_utf8(jobs.stdout).unwrap();
    assert!(text.starts_with("job,verdict,samples,quantity,measured,tolerance\n"));
    assert!(text.lines().skip(1).all(|l| l.starts_with("T2.1,pass,")));
}

#[test]
fn tensor_reports_contractions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cc.json");
    let out = out.to_str().unwrap();
    // constant curvature 1 in dimension 4: Ricci = 3 g, scalar curvature 12
    assert_eq!(code(&run(&["manifold", "--family", "constcurv:K=1,m=4", "--at", "0,0,0,0", "--emit", "riemann", "--out", out])), 0);
    let report = json(&run(&["tensor", "--tensor", out, "--vector", "1,0,0,0"]));
    assert!((report["scalar_curvature"].as_f64().unwrap() - 12.0).abs() < 1e-9);
    assert!(report["weyl_max_abs"].as_f64().unwrap() < 1e-9);
    let ricci_11 = report["ricci"][0][0].as_f64().unwrap();
    assert!((report["jacobi"]["trace_J_A"].as_f64().unwrap() - ricci_11).abs() < 1e-9);
    assert!(report["jacobi"]["trace_J_W"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn explore_always_succeeds() {
    let out = run(&["explore", "--trials", "3", "--vectors", "8", "--planes", "8"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["suite"], "explore");
}
