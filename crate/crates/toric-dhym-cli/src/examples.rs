//! Fixed worked examples written as report files. All inputs and seeds are
//! pinned, so the output is byte-stable.

use std::fmt::Write as _;
use std::path::Path;

use toric_dhym::bridgeland::KScan;

use crate::job::{render, run, Check, Failure, JobSpec, Report};

fn blp_p2(checks: Vec<Check>) -> JobSpec {
    JobSpec { preset: Some("blp_p2".into()), checks, ..Default::default() }
}

/// (file stem, job)
pub fn jobs() -> Vec<(&'static str, JobSpec)> {
    let collins_shi = JobSpec {
        omega: Some("2,-1@basis(h,e)".into()),
        omega_scale: Some("1/3".into()),
        alpha: Some("2,0@basis(h,e)".into()),
        l: Some("2,0@basis(h,e)".into()),
        k_range: Some("1..10".into()),
        ..blp_p2(vec![Check::CheckDhym, Check::Bridgeland, Check::Dictionary])
    };
    let min_angle = JobSpec {
        omega: Some("2,-1@basis(h,e)".into()),
        alpha: Some("5,-1@basis(h,e)".into()),
        seed: Some(toric_dhym::minangle::DEFAULT_SEED),
        ..blp_p2(vec![Check::MinAngle])
    };
    // ω = pH − qE and L1 = r(qH − pE) with p = 2, q = 1, r = 1. With β = tω,
    // Im Z(L1)·conj Z(E) = 9t/2 at k = 1, so the sub-bundle inequality needs t < 0.
    let keller_scarpa = JobSpec {
        omega: Some("2,-1@basis(h,e)".into()),
        beta: Some("-1/2,1/4@basis(h,e)".into()),
        l1: Some("1,-2@basis(h,e)".into()),
        l2: Some("0,0@basis(h,e)".into()),
        k: vec![1, 4, 16],
        ..blp_p2(vec![Check::HigherRank])
    };
    vec![("collins_shi", collins_shi), ("min_angle", min_angle), ("keller_scarpa", keller_scarpa)]
}

/// Plain-text table of the Arcara-Miles scan in a report.
pub fn scan_table(report: &Report) -> Option<String> {
    let r = report.results.iter().find(|r| r.check == Check::Bridgeland)?;
    let scan: KScan = serde_json::from_value(r.result["scan"].clone()).ok()?;
    let mut s = String::new();
    writeln!(s, "{:>3}  {:<8}  {:<18}  {:>10}     {:<10}  status", "k", "object", "destabilizer", "nu(sub)", "nu(obj)")
        .unwrap();
    for v in &scan.verdicts {
        for t in &v.tests {
            writeln!(
                s,
                "{:>3}  {:<8}  {:<18}  {:>10}  {}  {:<10}  {}",
                v.k,
                v.object,
                t.destabilizer,
                t.lhs,
                t.relation,
                t.rhs,
                serde_json::to_value(v.status).unwrap().as_str().unwrap()
            )
            .unwrap();
        }
    }
    if !scan.flips.is_empty() {
        let f: Vec<String> = scan.flips.iter().map(|k| k.to_string()).collect();
        writeln!(s, "flips at k = {}", f.join(", ")).unwrap();
    }
    Some(s)
}

/// Writes `<stem>.job.json` and `<stem>.json` per example, plus the scan table.
pub fn emit(dir: &Path) -> Result<Vec<String>, Failure> {
    let io = |e: std::io::Error| Failure::Input(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut written = vec![];
    for (stem, job) in jobs() {
        let report = run(&job)?;
        let job_text = serde_json::to_string_pretty(&job).expect("job serializes") + "\n";
        for (name, text) in [(format!("{stem}.job.json"), job_text), (format!("{stem}.json"), render(&report))] {
            std::fs::write(dir.join(&name), text).map_err(io)?;
            written.push(name);
        }
        if let Some(t) = scan_table(&report) {
            let name = format!("{stem}.txt");
            std::fs::write(dir.join(&name), t).map_err(io)?;
            written.push(name);
        }
    }
    Ok(written)
}
