use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use toric_dhym::bridgeland::KScan;
use toric_dhym::charges::StabilityReport;
use toric_dhym::minangle::MinAngleResult;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toric-dhym"))
}

fn exec(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

/// Runs with --json-out into `dir` and returns (exit code, report text).
fn report(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let path = dir.join(name);
    let out = bin().args(args).arg("--json-out").arg(&path).output().unwrap();
    let code = out.status.code().unwrap();
    (code, std::fs::read_to_string(&path).unwrap_or_default())
}

fn parse(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

/// blp_p2 with ω = 2h − e, the subcommand first.
fn cs<'a>(sub: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["--preset", "blp_p2", sub[0], "--omega", "2,-1@basis(h,e)"];
    v.extend_from_slice(&sub[1..]);
    v
}

#[test]
fn dhym_witness_is_the_exceptional_curve() {
    let dir = tempfile::tempdir().unwrap();
    let args = cs(&["check-dhym", "--alpha", "2,0"]);
    let (code, text) = report(dir.path(), "r.json", &args);
    assert_eq!(code, 0);
    let v = parse(&text);
    let res = &v["results"][0]["result"];
    assert_eq!(res["witness_labels"], serde_json::json!(["E"]));
    let rep: StabilityReport = serde_json::from_value(res["report"].clone()).unwrap();
    assert_eq!(rep.witnesses, vec![vec![3]]);
    assert_eq!(serde_json::to_value(&rep).unwrap(), res["report"]);
}

#[test]
fn k_scan_flips_at_two_after_rescaling() {
    let dir = tempfile::tempdir().unwrap();
    let args = cs(&["bridgeland", "--L", "2,0", "--k-scan", "1..10", "--omega-scale", "1/3"]);
    let (code, text) = report(dir.path(), "r.json", &args);
    assert_eq!(code, 0);
    let scan: KScan = serde_json::from_value(parse(&text)["results"][0]["result"]["scan"].clone()).unwrap();
    assert_eq!(scan.flips, vec![2]);
    assert_eq!(scan.verdicts.len(), 10);
    // without the rescaling the rational class puts the wall elsewhere
    let args = cs(&["bridgeland", "--L", "2,0", "--k-scan", "1..10"]);
    let (_, text) = report(dir.path(), "s.json", &args);
    let scan: KScan = serde_json::from_value(parse(&text)["results"][0]["result"]["scan"].clone()).unwrap();
    assert_eq!(scan.flips, vec![4, 5]);
}

#[test]
fn gamma_check_on_p1() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = report(dir.path(), "g.json", &["--preset", "p1", "gamma-check", "--q", "0.01", "--z", "1"]);
    assert_eq!(code, 0);
    let rel = parse(&text)["results"][0]["result"]["relative_discrepancy"].as_f64().unwrap();
    assert!(rel <= 1e-6, "{rel}");
}

#[test]
fn stdout_report_when_no_path() {
    let out = exec(&["--preset", "p1", "residue", "--q", "0.01", "--f", "1", "--g", "x"]);
    assert_eq!(out.status.code(), Some(0));
    let v = parse(std::str::from_utf8(&out.stdout).unwrap());
    let k = &v["results"][0]["result"]["value"];
    assert!((k[0].as_f64().unwrap() - 1.0).abs() < 1e-10 && k[1].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn exit_codes() {
    // unknown preset, missing fan, non-Kähler omega, usage errors: input
    assert_eq!(exec(&["--preset", "p7", "check-dhym", "--omega", "1", "--alpha", "1"]).status.code(), Some(1));
    assert_eq!(exec(&["check-dhym", "--omega", "1", "--alpha", "1"]).status.code(), Some(1));
    assert_eq!(exec(&["--preset", "p2", "check-dhym", "--omega", "-1", "--alpha", "1"]).status.code(), Some(1));
    assert_eq!(exec(&["--preset", "p2", "no-such-command"]).status.code(), Some(1));
    assert_eq!(exec(&["--preset", "p2", "check-dhym", "--omega", "1"]).status.code(), Some(1));
    // the search finds 5 critical points against 4 maximal cones
    let out = exec(&["--preset", "hirzebruch(3)", "lg-build", "--omega", "1,1,1,1", "--critical-points"]);
    assert_eq!(out.status.code(), Some(1), "hirzebruch(3) with omega = (1,1,1,1) is not Kähler");
    let out = exec(&["--preset", "hirzebruch(3)", "residue", "--q", "0.1,0.2", "--f", "1", "--g", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("critical points"));
    assert_eq!(exec(&["--help"]).status.code(), Some(0));
}

#[test]
fn error_lands_on_stderr() {
    let out = exec(&["--preset", "p2", "min-angle", "--omega", "1", "--alpha", "1,2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
}

#[test]
fn job_file_matches_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let job = serde_json::json!({
        "preset": "blp_p2",
        "omega": "2,-1@basis(h,e)",
        "alpha": "5,-1@basis(h,e)",
        "checks": ["min-angle"],
    });
    let jp = dir.path().join("job.json");
    std::fs::write(&jp, job.to_string()).unwrap();
    let (c1, a) = report(dir.path(), "a.json", &["run", "--job", jp.to_str().unwrap()]);
    let args = cs(&["min-angle", "--alpha", "5,-1@basis(h,e)"]);
    let (c2, b) = report(dir.path(), "b.json", &args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(parse(&a)["results"], parse(&b)["results"]);

    std::fs::write(&jp, r#"{"preset": "p2", "checks": []}"#).unwrap();
    assert_eq!(exec(&["run", "--job", jp.to_str().unwrap()]).status.code(), Some(1));
    std::fs::write(&jp, r#"{"preset": "p2", "checks": ["check-dhym"], "typo": 1}"#).unwrap();
    assert_eq!(exec(&["run", "--job", jp.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn fan_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let doc = serde_json::json!({
        "dim": 2,
        "rays": [[1, 0], [0, 1], [-1, -1], [1, 1]],
        "max_cones": [[0, 3], [3, 1], [1, 2], [2, 0]],
        "name": "my_blowup",
        "basis": [{"name": "h", "divisor": [0, 0, 1, 0]}, {"name": "e", "divisor": [0, 0, 0, 1]}],
    });
    let fp = dir.path().join("fan.json");
    std::fs::write(&fp, doc.to_string()).unwrap();
    let (code, text) = report(
        dir.path(),
        "r.json",
        &["--fan-file", fp.to_str().unwrap(), "check-dhym", "--omega", "2,-1@basis(h,e)", "--alpha", "2,0"],
    );
    assert_eq!(code, 0);
    let v = parse(&text);
    assert_eq!(v["fan"]["name"], "my_blowup");
    assert_eq!(v["results"][0]["result"]["witness_labels"], serde_json::json!(["E"]));
    let args = ["--fan-file", fp.to_str().unwrap(), "--preset", "p2", "check-dhym", "--omega", "1", "--alpha", "1"];
    assert_eq!(exec(&args).status.code(), Some(1));
}

#[test]
fn reports_round_trip_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        cs(&["check-dhym", "--alpha", "2,0"]),
        cs(&["bridgeland", "--L", "2,0", "--k", "3", "--dictionary"]),
        cs(&["min-angle", "--alpha", "5,-1@basis(h,e)"]),
        cs(&["jacob-sheu", "--L", "-2,1@basis(h,e)"]),
        cs(&["lg-build", "--critical-points"]),
        vec!["--preset", "p2", "period", "--q", "0.001", "--z", "1"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let (c1, a) = report(dir.path(), &format!("{i}a.json"), args);
        let (c2, b) = report(dir.path(), &format!("{i}b.json"), args);
        assert_eq!((c1, c2), (0, 0), "{args:?}");
        assert_eq!(a, b, "{args:?} is not deterministic");
        let v = parse(&a);
        assert_eq!(parse(&serde_json::to_string(&v).unwrap()), v);
    }
}

#[test]
fn examples_directory() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let out = exec(&["examples", "--out", d.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let mut names: Vec<String> =
        std::fs::read_dir(d1.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names.len(), 7);
    for n in &names {
        let a = std::fs::read(d1.path().join(n)).unwrap();
        let b = std::fs::read(d2.path().join(n)).unwrap();
        assert_eq!(a, b, "{n} differs between runs");
    }
    let cs = std::fs::read_to_string(d1.path().join("collins_shi.json")).unwrap();
    for frac in ["\"1/3\"", "\"3/8\"", "\"11/28\""] {
        assert!(cs.contains(frac), "{frac}");
    }
    let ma = std::fs::read_to_string(d1.path().join("min_angle.json")).unwrap();
    assert!(ma.contains("10 - sqrt(78)"));
    let r: MinAngleResult = serde_json::from_value(parse(&ma)["results"][0]["result"]["min_angle"].clone()).unwrap();
    assert_eq!(r.support, vec![3]);
    assert!(d1.path().join("keller_scarpa.json").exists());
    // the emitted job files reproduce the reports
    let (code, again) =
        report(d1.path(), "rerun.json", &["run", "--job", d1.path().join("min_angle.job.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(again, ma);
}
