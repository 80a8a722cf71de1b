//! Job specifications and the report document. Every subcommand lowers to a
//! JobSpec, so `run --job` and the subcommands share one code path.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use toric_dhym::bridgeland::{arcara_miles_scan, dhym_bridgeland_dictionary, higher_rank_instability, KScan, Status};
use toric_dhym::charges::{
    dhym_nakai_moishezon, higher_rank_inequalities, jacob_sheu_check, phase_inequality_form, topological_angles,
    ComplexifiedClass, Tolerance,
};
use toric_dhym::exact::{parse_rational, q_to_f64};
use toric_dhym::lg::{
    build_lg, check_relations, critical_points_with, gamma_lhs, positive_cycle_period, residue_pairing, LaurentPoly,
    LgModel, NovikovPoint,
};
use toric_dhym::minangle::{minimal_angle_with, semipositivity_check, DEFAULT_SEED};
use toric_dhym::par::Exec;
use toric_dhym::{preset_fan, CohClass, DivisorClass, Fan, Q};

/// Default seed of the critical-point search.
const CRITICAL_SEED: u64 = 7;
const CRITICAL_STARTS: usize = 200;
const DEFAULT_N_MAX: u64 = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
#[allow(clippy::enum_variant_names)] // named after the subcommands
pub enum Check {
    LgBuild,
    CriticalPoints,
    CheckDhym,
    PhaseForm,
    JacobSheu,
    MinAngle,
    Bridgeland,
    Dictionary,
    HigherRank,
    Instability,
    Period,
    GammaCheck,
    Residue,
}

impl Check {
    fn name(self) -> String {
        serde_json::to_value(self).unwrap().as_str().unwrap().to_string()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
    /// ω is multiplied by sqrt(omega_scale).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_scale: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l2: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k: Vec<u64>,
    /// Inclusive range "a..b".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_range: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub q: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    pub checks: Vec<Check>,
    /// Float tolerance for verdicts; exact arithmetic when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FanSummary {
    pub name: Option<String>,
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    pub ray_labels: Vec<String>,
}

/// A class in ray coordinates, exact and as floats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassEcho {
    pub input: String,
    pub exact: Vec<String>,
    pub float: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: Check,
    pub summary: String,
    pub result: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub fan: FanSummary,
    pub job: JobSpec,
    pub classes: BTreeMap<String, ClassEcho>,
    pub results: Vec<CheckResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Input(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "input error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<toric_dhym::Error> for Failure {
    fn from(e: toric_dhym::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn input(m: impl Into<String>) -> Failure {
    Failure::Input(m.into())
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

pub fn load_fan(preset: Option<&str>, file: Option<&PathBuf>) -> Res<Fan> {
    match (preset, file) {
        (Some(_), Some(_)) => Err(input("give either a preset or a fan file, not both")),
        (Some(p), None) => Ok(preset_fan(p)?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
            Ok(Fan::load(&text)?)
        }
        (None, None) => Err(input("no fan: pass --preset or --fan-file")),
    }
}

/// "H" for a ray whose divisor is the basis element h, else "D<i>".
pub fn ray_labels(fan: &Fan) -> Vec<String> {
    (0..fan.num_rays())
        .map(|i| {
            fan.basis()
                .iter()
                .find(|(_, v)| v.iter().enumerate().all(|(j, &x)| x == i64::from(i == j)))
                .map(|(n, _)| n.to_uppercase())
                .unwrap_or_else(|| format!("D{i}"))
        })
        .collect()
}

fn parse_k_range(s: &str) -> Res<(u64, u64)> {
    let bad = || input(format!("bad k range '{s}', expected a..b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}

struct Ctx<'a> {
    fan: Fan,
    job: &'a JobSpec,
    labels: Vec<String>,
    classes: BTreeMap<String, ClassEcho>,
}

impl<'a> Ctx<'a> {
    fn raw(&self, name: &str) -> Option<&'a String> {
        let j = self.job;
        match name {
            "omega" => j.omega.as_ref(),
            "beta" => j.beta.as_ref(),
            "alpha" => j.alpha.as_ref(),
            "l" => j.l.as_ref(),
            "l1" => j.l1.as_ref(),
            "l2" => j.l2.as_ref(),
            _ => None,
        }
    }

    fn class(&self, name: &str, check: Check) -> Res<DivisorClass> {
        let s = self.raw(name).ok_or_else(|| input(format!("{} needs --{name}", check.name())))?;
        Ok(DivisorClass::parse(&self.fan, s)?)
    }

    fn tol(&self) -> Tolerance {
        self.job.tol.map_or(Tolerance::Exact, Tolerance::Float)
    }

    fn complexified(&self, check: Check) -> Res<ComplexifiedClass> {
        let omega = self.class("omega", check)?;
        let beta = match &self.job.beta {
            Some(s) => DivisorClass::parse(&self.fan, s)?,
            None => DivisorClass::zero(self.fan.num_rays()),
        };
        let mut c = ComplexifiedClass::new(&self.fan, omega, beta, Q::from_integer(1.into()))?;
        if let Some(s) = &self.job.omega_scale {
            c = c.with_sqrt_scale(parse_rational(s)?)?;
        }
        Ok(c)
    }

    /// Novikov point from --q (Mori generator coordinates) or from ω, β.
    fn point(&self, check: Check) -> Res<NovikovPoint> {
        if !self.job.q.is_empty() {
            if self.job.omega.is_some() {
                return Err(input("give either --q or --omega, not both"));
            }
            return Ok(NovikovPoint::from_generators(&self.fan, &self.job.q)?);
        }
        if self.job.omega.is_none() {
            return Err(input(format!("{} needs --q or --omega", check.name())));
        }
        Ok(NovikovPoint::from_class(&self.complexified(check)?))
    }

    fn model(&self, check: Check) -> Res<LgModel> {
        Ok(LgModel::at_point(&self.fan, self.point(check)?)?)
    }

    fn z(&self, check: Check) -> Res<f64> {
        let z = self.job.z.ok_or_else(|| input(format!("{} needs --z", check.name())))?;
        if !(z > 0.0 && z.is_finite()) {
            return Err(input("z must be positive"));
        }
        Ok(z)
    }

    fn ks(&self, default: (u64, u64)) -> Res<Vec<u64>> {
        if !self.job.k.is_empty() && self.job.k_range.is_some() {
            return Err(input("give either k or a k range, not both"));
        }
        if self.job.k.contains(&0) {
            return Err(input("k must be positive"));
        }
        if !self.job.k.is_empty() {
            return Ok(self.job.k.clone());
        }
        let (a, b) = match &self.job.k_range {
            Some(s) => parse_k_range(s)?,
            None => default,
        };
        Ok((a..=b).collect())
    }

    fn label_cones(&self, cones: &[Vec<usize>]) -> Vec<String> {
        cones.iter().map(|c| c.iter().map(|&i| self.labels[i].clone()).collect::<Vec<_>>().join("∩")).collect()
    }

    fn run(&self, check: Check) -> Res<CheckResult> {
        let fan = &self.fan;
        let (summary, result) = match check {
            Check::CheckDhym => {
                let c = self.complexified(check)?;
                let alpha = self.class("alpha", check)?;
                let angles = topological_angles(fan, &c, &alpha)?;
                let rep = dhym_nakai_moishezon(fan, &c, &alpha, self.tol())?;
                let w = self.label_cones(&rep.witnesses);
                (
                    verdict_line(&to_value(&rep.overall), &w),
                    json!({ "angles": angles, "report": rep, "witness_labels": w }),
                )
            }
            Check::PhaseForm => {
                let c = self.complexified(check)?;
                let rep = phase_inequality_form(fan, &c, &self.class("l", check)?)?;
                let w = self.label_cones(&rep.witnesses);
                (verdict_line(&to_value(&rep.overall), &w), json!({ "report": rep, "witness_labels": w }))
            }
            Check::JacobSheu => {
                let c = self.complexified(check)?;
                let rep = jacob_sheu_check(fan, &c, &self.class("l", check)?)?;
                let w = self.label_cones(&rep.report.witnesses);
                (verdict_line(&to_value(&rep.report.overall), &w), json!({ "report": rep, "witness_labels": w }))
            }
            Check::MinAngle => {
                let omega = self.class("omega", check)?;
                let alpha = self.class("alpha", check)?;
                let seed = self.job.seed.unwrap_or(DEFAULT_SEED);
                let r = minimal_angle_with(Exec::default(), fan, &omega, &alpha, seed)?;
                let semi = semipositivity_check(fan, &omega, &alpha)?;
                let cot = r.cot_theta_min_exact.as_ref().map_or(format!("{:.12}", r.cot_theta_min), |s| s.to_string());
                let support: Vec<String> = r.support.iter().map(|&i| self.labels[i].clone()).collect();
                (
                    format!(
                        "cot theta_min = {cot} (cot phi = {}), support {{{}}}, semipositivity {}",
                        toric_dhym::exact::fmt_rational(&r.cot_phi),
                        support.join(", "),
                        if semi.passes { "passes" } else { "fails" }
                    ),
                    json!({ "min_angle": r, "support_labels": support, "semipositivity": semi }),
                )
            }
            Check::Bridgeland => {
                let c = self.complexified(check)?;
                let l = self.class("l", check)?;
                let ks = self.ks((1, 10))?;
                let verdicts = ks.iter().map(|&k| arcara_miles_scan(fan, &c, &l, k)).collect::<Result<Vec<_>, _>>()?;
                let flips: Vec<u64> =
                    verdicts.windows(2).filter(|w| w[0].status != w[1].status).map(|w| w[1].k).collect();
                let statuses: Vec<String> =
                    verdicts.iter().map(|v| format!("k={}: {}", v.k, status_name(v.status))).collect();
                let summary = if flips.is_empty() {
                    statuses.join(", ")
                } else {
                    format!("{}; flips at k = {}", statuses.join(", "), join(&flips))
                };
                (summary, json!({ "scan": KScan { verdicts, flips } }))
            }
            Check::Dictionary => {
                let c = self.complexified(check)?;
                let l = self.class("l", check)?;
                let recs = self
                    .ks((1, 1))?
                    .into_iter()
                    .map(|k| dhym_bridgeland_dictionary(fan, &c, &l, k))
                    .collect::<Result<Vec<_>, _>>()?;
                let agree = recs.iter().filter(|r| r.agree).count();
                (format!("{agree} of {} scales agree", recs.len()), json!({ "records": recs }))
            }
            Check::HigherRank => {
                let c = self.complexified(check)?;
                let (l1, l2) = self.pair(check)?;
                let ks = self.ks((1, 1))?;
                let reps = ks
                    .iter()
                    .map(|&k| higher_rank_inequalities(fan, &c, &l1, &l2, k))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut traj: BTreeMap<String, Vec<f64>> = BTreeMap::new();
                for r in &reps {
                    traj.entry("Z_X(E)".into()).or_default().push(r.arg_z_x);
                    for t in &r.tests {
                        let key = if t.cone.is_empty() {
                            t.object.clone()
                        } else {
                            format!("{} on {}", t.object, self.label_cones(std::slice::from_ref(&t.cone))[0])
                        };
                        traj.entry(key).or_default().push(t.arg_offset);
                    }
                }
                let monotone: BTreeMap<String, bool> = traj.iter().map(|(k, v)| (k.clone(), is_monotone(v))).collect();
                let summary = reps
                    .iter()
                    .map(|r| format!("k={}: {}", r.k, verdict_name(&to_value(&r.overall))))
                    .collect::<Vec<_>>();
                (summary.join(", "), json!({ "reports": reps, "arg_trajectories": traj, "monotone": monotone }))
            }
            Check::Instability => {
                let c = self.complexified(check)?;
                let (l1, l2) = self.pair(check)?;
                let vs = self
                    .ks((1, 1))?
                    .into_iter()
                    .map(|k| higher_rank_instability(fan, &c, &l1, &l2, k))
                    .collect::<Result<Vec<_>, _>>()?;
                let summary = vs
                    .iter()
                    .map(|v| match &v.witness {
                        Some(w) => format!("k={}: {} ({w})", v.k, status_name(v.status)),
                        None => format!("k={}: {}", v.k, status_name(v.status)),
                    })
                    .collect::<Vec<_>>();
                (summary.join(", "), json!({ "verdicts": vs }))
            }
            Check::LgBuild => {
                let c = self.complexified(check)?;
                let m = build_lg(fan, &c)?;
                let rel = check_relations(fan, &m);
                (
                    format!("{} monomials, relation defect {:.2e}", m.exponents.len(), rel.max_defect),
                    json!({ "model": m, "relations": rel }),
                )
            }
            Check::CriticalPoints => {
                let m = self.model(check)?;
                let seed = self.job.seed.unwrap_or(CRITICAL_SEED);
                let pts = critical_points_with(Exec::default(), &m, seed, CRITICAL_STARTS)?;
                (format!("{} critical points", pts.len()), json!({ "points": pts }))
            }
            Check::Period => {
                let m = self.model(check)?;
                let p = positive_cycle_period(&m, self.z(check)?)?;
                (format!("period {:.15e} (error {:.1e})", p.value.re, p.error_estimate), json!({ "period": p }))
            }
            Check::GammaCheck => {
                let z = self.z(check)?;
                let pt = self.point(check)?;
                let m = LgModel::at_point(fan, pt.clone())?;
                let n_max = self.job.n_max.unwrap_or(DEFAULT_N_MAX);
                let lhs = gamma_lhs(fan, &pt, Complex64::new(z, 0.0), &CohClass::one(fan.dim()), n_max)?;
                let per = positive_cycle_period(&m, z)?;
                let rel = (lhs.value - per.value).norm() / per.value.norm();
                (
                    format!("relative discrepancy {rel:.3e}"),
                    json!({ "gamma_lhs": lhs, "period": per, "relative_discrepancy": rel }),
                )
            }
            Check::Residue => {
                let m = self.model(check)?;
                let n = fan.dim();
                let parse = |name: &str, s: &Option<String>| -> Res<LaurentPoly> {
                    let s = s.as_ref().ok_or_else(|| input(format!("residue needs --{name}")))?;
                    Ok(LaurentPoly::parse(s, n)?)
                };
                let f = parse("f", &self.job.f)?;
                let g = parse("g", &self.job.g)?;
                let v = residue_pairing(&m, &f, &g)?;
                (format!("K(f, g) = {:.12e} + {:.12e}i", v.re, v.im), json!({ "value": v }))
            }
        };
        Ok(CheckResult { check, summary, result })
    }

    fn pair(&self, check: Check) -> Res<(DivisorClass, DivisorClass)> {
        let l1 = self.class("l1", check)?;
        let l2 = match self.job.l2 {
            Some(_) => self.class("l2", check)?,
            None => DivisorClass::zero(self.fan.num_rays()),
        };
        Ok((l1, l2))
    }
}

fn join(ks: &[u64]) -> String {
    ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")
}

fn status_name(s: Status) -> String {
    verdict_name(&to_value(&s))
}

fn verdict_name(v: &Value) -> String {
    v.as_str().unwrap_or("?").to_string()
}

fn verdict_line(v: &Value, witnesses: &[String]) -> String {
    if witnesses.is_empty() {
        verdict_name(v)
    } else {
        format!("{}; witnesses {}", verdict_name(v), witnesses.join(", "))
    }
}

fn is_monotone(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0]) || v.windows(2).all(|w| w[1] <= w[0])
}

fn echo(fan: &Fan, s: &str) -> Res<ClassEcho> {
    let d = DivisorClass::parse(fan, s)?;
    Ok(ClassEcho {
        input: s.to_string(),
        exact: d.coeffs.iter().map(toric_dhym::exact::fmt_rational).collect(),
        float: d.coeffs.iter().map(q_to_f64).collect(),
    })
}

/// Validates the job and runs its checks in dependency order.
pub fn run(job: &JobSpec) -> Res<Report> {
    if job.checks.is_empty() {
        return Err(input("no checks requested"));
    }
    let fan = load_fan(job.preset.as_deref(), job.fan_file.as_ref())?;
    let mut classes = BTreeMap::new();
    for (name, s) in [
        ("omega", &job.omega),
        ("beta", &job.beta),
        ("alpha", &job.alpha),
        ("l", &job.l),
        ("l1", &job.l1),
        ("l2", &job.l2),
    ] {
        if let Some(s) = s {
            classes.insert(name.to_string(), echo(&fan, s)?);
        }
    }
    if let Some(s) = &job.omega_scale {
        parse_rational(s)?;
    }
    let labels = ray_labels(&fan);
    let summary = FanSummary {
        name: fan.name().map(str::to_string),
        dim: fan.dim(),
        rays: fan.rays().to_vec(),
        max_cones: fan.max_cones().to_vec(),
        ray_labels: labels.clone(),
    };
    let mut embedded = job.clone();
    embedded.output = None;
    let ctx = Ctx { fan, job, labels, classes };
    let mut checks = job.checks.clone();
    checks.sort();
    checks.dedup();
    let results = checks.into_iter().map(|c| ctx.run(c)).collect::<Res<Vec<_>>>()?;
    Ok(Report {
        tool: format!("toric-dhym {}", env!("CARGO_PKG_VERSION")),
        fan: summary,
        job: embedded,
        classes: ctx.classes,
        results,
    })
}

pub fn render(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(checks: Vec<Check>) -> JobSpec {
        JobSpec { preset: Some("blp_p2".into()), checks, ..Default::default() }
    }

    #[test]
    fn k_ranges() {
        assert_eq!(parse_k_range("1..10").unwrap(), (1, 10));
        assert_eq!(parse_k_range("2..=3").unwrap(), (2, 3));
        assert!(parse_k_range("0..3").is_err());
        assert!(parse_k_range("5..3").is_err());
        assert!(parse_k_range("3").is_err());
    }

    #[test]
    fn labels_follow_the_basis() {
        let f = preset_fan("blp_p2").unwrap();
        assert_eq!(ray_labels(&f), vec!["D0", "D1", "H", "E"]);
    }

    #[test]
    fn missing_inputs_are_input_errors() {
        assert_eq!(run(&job(vec![])).unwrap_err().exit_code(), 1);
        let e = run(&job(vec![Check::CheckDhym])).unwrap_err();
        assert!(matches!(e, Failure::Input(m) if m.contains("--omega")));
        let mut j = job(vec![Check::MinAngle]);
        j.omega = Some("2,-1,0".into());
        j.alpha = Some("1,0".into());
        assert_eq!(run(&j).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn checks_run_in_a_fixed_order() {
        let mut j = job(vec![Check::Bridgeland, Check::CheckDhym, Check::Bridgeland]);
        j.omega = Some("2,-1@basis(h,e)".into());
        j.alpha = Some("2,0".into());
        j.l = Some("2,0".into());
        j.k = vec![1];
        let r = run(&j).unwrap();
        let order: Vec<Check> = r.results.iter().map(|c| c.check).collect();
        assert_eq!(order, vec![Check::CheckDhym, Check::Bridgeland]);
    }

    #[test]
    fn typed_round_trip() {
        let mut j = job(vec![Check::MinAngle, Check::LgBuild, Check::JacobSheu]);
        j.omega = Some("2,-1@basis(h,e)".into());
        j.alpha = Some("5,-1@basis(h,e)".into());
        j.l = Some("-2,1@basis(h,e)".into());
        j.beta = Some("1/3,0".into());
        let r = run(&j).unwrap();
        let back: Report = serde_json::from_str(&render(&r)).unwrap();
        assert_eq!(back, r);
        assert_eq!(render(&back), render(&r));
    }
}
