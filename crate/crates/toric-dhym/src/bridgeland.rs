//! Tilted-heart stability on toric surfaces: slopes, heart membership,
//! Arcara-Miles destabilizer scans and the comparison with dHYM positivity.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::charges::{
    dhym_nakai_moishezon, s_object_chern, ComplexifiedClass, StabilityReport, Tolerance, Verdict as DhymVerdict,
};
use crate::chow::{chern_character, evaluate_top, positivity_cones, CohClass, DivisorClass};
use crate::error::{Error, Result};
use crate::exact::{cmp_arg, fmt_rational, q, Gauss, Surd, SurdComplex, Q};
use crate::fan::{blp_pn, blpq_p2, Fan, Stratum};
use crate::par::{map_range, map_slice, Exec};

pub const TORIC_CURVES_ONLY: &str =
    "negative curves on a toric surface are torus-invariant; only toric curves are scanned";

fn require_surface(fan: &Fan) -> Result<()> {
    if fan.dim() != 2 {
        return Err(Error::NotSurface(fan.dim()));
    }
    Ok(())
}

/// μ = (ch₁^β·kω)/ch₀, or +∞ for torsion classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slope {
    Finite(Surd),
    Infinite,
}

impl Slope {
    pub fn signum(&self) -> i8 {
        match self {
            Slope::Finite(s) => s.signum(),
            Slope::Infinite => 1,
        }
    }
}

/// (ch₀, ω_r·ch₁^β, ch₂^β) at total scale K, with ω_r the rational part of ω.
struct Parts {
    ch0: Q,
    w_ch1: Q,
    ch2: Q,
}

fn parts(fan: &Fan, c: &ComplexifiedClass, scale: &Q, ch: &CohClass<Q>) -> Parts {
    let n = fan.dim();
    let twist = c.beta.scale(scale).neg().to_class::<Q>(n).exp_nilpotent();
    let tw = &twist * ch;
    let w_ch1 = evaluate_top(fan, &(&c.omega.to_class::<Q>(n) * &tw.degree_part(1)));
    Parts { ch0: tw.constant_term(), w_ch1, ch2: evaluate_top(fan, &tw.degree_part(2)) }
}

fn total_scale(c: &ComplexifiedClass, k: u64) -> Q {
    &c.k * q(k as i64)
}

/// Sign-faithful slope with the common factor sqrt(s) removed.
fn mu_rational(p: &Parts, scale: &Q) -> Option<Q> {
    (!p.ch0.is_zero()).then(|| scale * &p.w_ch1 / &p.ch0)
}

/// Bridgeland slope −Re Z / Im Z multiplied by sqrt(s), which is rational
/// for rational input.
fn nu_rational(fan: &Fan, c: &ComplexifiedClass, p: &Parts, scale: &Q) -> Result<Q> {
    let n = fan.dim();
    let w2 = evaluate_top(fan, &c.omega.to_class::<Q>(n).pow(2));
    let den = scale * &p.w_ch1;
    if den.is_zero() {
        return Err(Error::Precondition("object has Im Z = 0 (slope on a wall)".into()));
    }
    let num = &p.ch2 - &p.ch0 * scale * scale * &c.omega_sq_scale * w2 / q(2);
    Ok(num / den)
}

pub fn twisted_slope(fan: &Fan, c: &ComplexifiedClass, e: &CohClass<Q>) -> Result<Slope> {
    require_surface(fan)?;
    if e.is_zero() {
        return Err(Error::Precondition("zero class".into()));
    }
    let p = parts(fan, c, &c.k, e);
    Ok(match mu_rational(&p, &c.k) {
        Some(m) => Slope::Finite(Surd::sqrt_of(&c.omega_sq_scale).scale(&m)),
        None => Slope::Infinite,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub reason: String,
}

/// Coh^♯: torsion-free part of slope ≤ 0 in degree −1, slope > 0 or torsion in degree 0.
pub fn heart_membership(fan: &Fan, c: &ComplexifiedClass, e: &CohClass<Q>, shift: u8) -> Result<Membership> {
    let s = twisted_slope(fan, c, e)?;
    let torsion = s == Slope::Infinite;
    let sign = s.signum();
    let (member, reason) = match (shift, torsion) {
        (0, true) => (true, "torsion".to_string()),
        (0, false) if sign > 0 => (true, "slope > 0".into()),
        (0, false) => (false, "slope <= 0".into()),
        (1, true) => (false, "torsion objects are not shifted into the heart".into()),
        (1, false) if sign <= 0 => (true, "slope <= 0".into()),
        (1, false) => (false, "slope > 0".into()),
        _ => (false, format!("shift {shift} is not 0 or 1")),
    };
    Ok(Membership { member, reason })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativeCurve {
    pub ray: usize,
    pub self_intersection: i64,
    pub class: DivisorClass,
}

pub fn negative_curves(fan: &Fan) -> Result<Vec<NegativeCurve>> {
    require_surface(fan)?;
    let m = fan.num_rays();
    Ok(fan
        .surface_curve_selfintersections()?
        .into_iter()
        .filter(|s| s.self_intersection < 0)
        .map(|s| NegativeCurve {
            ray: s.ray,
            self_intersection: s.self_intersection,
            class: DivisorClass::ray(m, s.ray),
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Stable,
    Semistable,
    Unstable,
}

/// ν(destabilizer) against ν(object) for one negative curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveTest {
    pub ray: usize,
    pub destabilizer: String,
    pub lhs: String,
    pub rhs: String,
    pub lhs_f64: f64,
    pub rhs_f64: f64,
    pub relation: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<String>,
    pub witness_rays: Vec<usize>,
    pub k: u64,
    pub object: String,
    pub tests: Vec<CurveTest>,
    /// Factor by which the reported slopes exceed −Re Z/Im Z (ω = sqrt(s)·ω_r).
    pub rescale: String,
    pub conditional_on_arcara_miles: bool,
    pub assumptions: Vec<String>,
}

fn am_known(fan: &Fan) -> bool {
    let a = blp_pn(2).map(|f| fan.same_fan(&f)).unwrap_or(false);
    let b = blpq_p2().map(|f| fan.same_fan(&f)).unwrap_or(false);
    a || b
}

fn rescale_note(c: &ComplexifiedClass) -> String {
    if c.omega_sq_scale.is_one() {
        "1".into()
    } else {
        Surd::sqrt_of(&c.omega_sq_scale).to_string()
    }
}

/// Arcara-Miles scan of L^k (slope > 0) or L^k[1] (slope < 0) against the
/// destabilizers L^k(−C) ⊂ L^k, resp. L^k(C)|_C ⊂ L^k[1], over negative curves C.
pub fn arcara_miles_scan(fan: &Fan, c: &ComplexifiedClass, l: &DivisorClass, k: u64) -> Result<Verdict> {
    require_surface(fan)?;
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let n = 2;
    let scale = total_scale(c, k);
    let kq = q(k as i64);
    let lk = l.scale(&kq);
    let ch_obj = chern_character(&lk, n);
    let p_obj = parts(fan, c, &scale, &ch_obj);
    let mu = mu_rational(&p_obj, &scale).expect("line bundles have rank 1");
    let shifted = match mu.cmp(&Q::zero()) {
        Ordering::Greater => false,
        Ordering::Less => true,
        Ordering::Equal => {
            return Err(Error::HeartViolation(
                "L^k has twisted slope 0: neither L^k nor L^k[1] has a finite phase".into(),
            ))
        }
    };
    let rhs = nu_rational(fan, c, &p_obj, &scale)?;
    let mut tests = vec![];
    let mut worst = Status::Stable;
    let mut witness = None;
    let mut witness_rays = vec![];
    for nc in negative_curves(fan)? {
        let (name, lhs) = if shifted {
            let twisted = lk.add(&nc.class);
            let pt = parts(fan, c, &scale, &chern_character(&twisted, n));
            if mu_rational(&pt, &scale).unwrap().is_positive() {
                return Err(Error::HeartViolation(format!(
                    "L^k(D{}) has positive slope; L^k(C)|_C is not a subobject",
                    nc.ray
                )));
            }
            let ch = &chern_character(&twisted, n) - &ch_obj;
            let p = parts(fan, c, &scale, &ch);
            (format!("L^{k}(D{0})|_D{0}", nc.ray), nu_rational(fan, c, &p, &scale)?)
        } else {
            let sub = lk.sub(&nc.class);
            let p = parts(fan, c, &scale, &chern_character(&sub, n));
            if !mu_rational(&p, &scale).unwrap().is_positive() {
                return Err(Error::HeartViolation(format!("L^k(-D{}) has slope <= 0 and is not in the heart", nc.ray)));
            }
            (format!("L^{k}(-D{})", nc.ray), nu_rational(fan, c, &p, &scale)?)
        };
        let (rel, st) = match lhs.cmp(&rhs) {
            Ordering::Less => ("<", Status::Stable),
            Ordering::Equal => ("=", Status::Semistable),
            Ordering::Greater => (">", Status::Unstable),
        };
        if st == Status::Unstable && witness.is_none() {
            witness = Some(name.clone());
        }
        if st == Status::Unstable {
            witness_rays.push(nc.ray);
        }
        if st == Status::Unstable || (st == Status::Semistable && worst == Status::Stable) {
            worst = st;
        }
        tests.push(CurveTest {
            ray: nc.ray,
            destabilizer: name,
            lhs: fmt_rational(&lhs),
            rhs: fmt_rational(&rhs),
            lhs_f64: crate::exact::q_to_f64(&lhs),
            rhs_f64: crate::exact::q_to_f64(&rhs),
            relation: rel.into(),
        });
    }
    Ok(Verdict {
        status: worst,
        witness,
        witness_rays,
        k,
        object: if shifted { format!("L^{k}[1]") } else { format!("L^{k}") },
        tests,
        rescale: rescale_note(c),
        conditional_on_arcara_miles: !am_known(fan),
        assumptions: vec![TORIC_CURVES_ONLY.into()],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KScan {
    pub verdicts: Vec<Verdict>,
    /// k at which the status differs from the one at k − 1.
    pub flips: Vec<u64>,
}

pub fn k_scan(fan: &Fan, c: &ComplexifiedClass, l: &DivisorClass, k_max: u64) -> Result<KScan> {
    k_scan_with(Exec::default(), fan, c, l, k_max)
}

pub fn k_scan_with(exec: Exec, fan: &Fan, c: &ComplexifiedClass, l: &DivisorClass, k_max: u64) -> Result<KScan> {
    let verdicts = map_range(exec, k_max as usize, |i| arcara_miles_scan(fan, c, l, i as u64 + 1))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let flips = verdicts.windows(2).filter(|w| w[0].status != w[1].status).map(|w| w[1].k).collect();
    Ok(KScan { verdicts, flips })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DictionaryRecord {
    pub k: u64,
    pub dhym: DhymVerdict,
    pub bridgeland: Status,
    /// dHYM positive ⇔ L^k[1] stable.
    pub agree: bool,
    /// Whether the equivalence is expected to hold for these inputs.
    pub asserted: bool,
    /// Scale beyond which every violated curve is detected, max |C²|/(2|lhs(C)|).
    pub k_threshold: Option<f64>,
    pub notes: Vec<String>,
    pub dhym_report: StabilityReport,
    pub scan: Verdict,
}

/// dhym_nakai_moishezon(ω, −L) against arcara_miles_scan(L, k).
pub fn dhym_bridgeland_dictionary(
    fan: &Fan,
    c: &ComplexifiedClass,
    l: &DivisorClass,
    k: u64,
) -> Result<DictionaryRecord> {
    require_surface(fan)?;
    let alpha = l.neg();
    let base = c.clone().with_k(Q::one())?;
    let rep = dhym_nakai_moishezon(fan, &base, &alpha, Tolerance::Exact)?;
    let scan = arcara_miles_scan(fan, c, l, k)?;
    let mut notes = vec![];
    let ample = positivity_cones(fan, &alpha).is_kahler;
    if !ample {
        notes.push("L^∨ not ample".to_string());
    }
    if !rep.generic {
        notes.push("wall; dictionary not asserted".to_string());
    }
    let mut threshold: Option<f64> = None;
    for nc in negative_curves(fan)? {
        if let Some(r) = rep.record(&[nc.ray]) {
            if r.lhs_f64 < 0.0 {
                let t = (nc.self_intersection as f64).abs() / (2.0 * r.lhs_f64.abs());
                threshold = Some(threshold.map_or(t, |x: f64| x.max(t)));
            }
        }
    }
    let kk = crate::exact::q_to_f64(&total_scale(c, k));
    if let Some(t) = threshold {
        if kk <= t {
            notes.push(format!("k = {k} is below the detection scale {t:.6}"));
        }
    }
    if scan.conditional_on_arcara_miles {
        notes.push("conditional on Arcara-Miles".into());
    }
    let dhym_pos = rep.overall == DhymVerdict::Positive;
    let agree = dhym_pos == (scan.status == Status::Stable);
    let asserted = ample && rep.generic && threshold.is_none_or(|t| kk > t);
    Ok(DictionaryRecord {
        k,
        dhym: rep.overall,
        bridgeland: scan.status,
        agree,
        asserted,
        k_threshold: threshold,
        notes,
        dhym_report: rep,
        scan,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SObjectCheck {
    pub ray: usize,
    pub k: u64,
    pub k_v: u64,
    pub nu_s: String,
    pub nu_object: String,
    pub status: Status,
}

/// ν(S(kL, k_V V)) against ν(L^k[1]) for each toric divisor V.
pub fn s_object_phase_check(
    fan: &Fan,
    c: &ComplexifiedClass,
    l: &DivisorClass,
    k: u64,
    k_v: u64,
) -> Result<Vec<SObjectCheck>> {
    require_surface(fan)?;
    let scale = total_scale(c, k);
    let lk = l.scale(&q(k as i64));
    let p_obj = parts(fan, c, &scale, &chern_character(&lk, 2));
    let mu = mu_rational(&p_obj, &scale).unwrap();
    if !mu.is_negative() {
        return Err(Error::HeartViolation("L^k[1] requires slope < 0".into()));
    }
    let rhs = nu_rational(fan, c, &p_obj, &scale)?;
    let strata: Vec<Stratum> = fan.enumerate_strata().into_iter().filter(|s| s.codim == 1).collect();
    map_slice(Exec::default(), &strata, |v: &Stratum| {
        let ch = s_object_chern(fan, l, v, k, k_v)?;
        let p = parts(fan, c, &scale, &ch);
        let lhs = nu_rational(fan, c, &p, &scale)?;
        Ok(SObjectCheck {
            ray: v.cone[0],
            k,
            k_v,
            nu_s: fmt_rational(&lhs),
            nu_object: fmt_rational(&rhs),
            status: match lhs.cmp(&rhs) {
                Ordering::Less => Status::Stable,
                Ordering::Equal => Status::Semistable,
                Ordering::Greater => Status::Unstable,
            },
        })
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTest {
    pub object: String,
    pub z: SurdComplex,
    pub arg: f64,
    pub relation: String,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankTwoVerdict {
    pub status: Status,
    pub witness: Option<String>,
    pub k: u64,
    pub z_e_shift: SurdComplex,
    pub arg_e_shift: f64,
    pub tests: Vec<PhaseTest>,
    pub note: String,
}

fn z_bridgeland(fan: &Fan, c: &ComplexifiedClass, scale: &Q, ch: &CohClass<Q>) -> SurdComplex {
    let n = fan.dim();
    let sc = Surd::rational(scale.clone());
    let b = c.beta.to_class::<Surd>(n).scale(&sc);
    let w = c.omega_class(n).scale(&Surd::rational(scale / &c.k));
    let x = crate::charges::complexify(&-&b, &-&w).exp_nilpotent();
    let chs = ch.map(|x| Gauss::new(Surd::rational(x.clone()), Surd::zero()));
    -evaluate_top(fan, &(&x * &chs))
}

/// Phase comparisons of S_V → E_k[1] and L₁^k[1] → E_k[1] for E_k an
/// extension of L₂^k by L₁^k, with S_V the cone of E_k → E_k(k_V V).
pub fn higher_rank_instability(
    fan: &Fan,
    c: &ComplexifiedClass,
    l1: &DivisorClass,
    l2: &DivisorClass,
    k: u64,
) -> Result<RankTwoVerdict> {
    higher_rank_instability_kv(fan, c, l1, l2, k, 1)
}

pub fn higher_rank_instability_kv(
    fan: &Fan,
    c: &ComplexifiedClass,
    l1: &DivisorClass,
    l2: &DivisorClass,
    k: u64,
    k_v: u64,
) -> Result<RankTwoVerdict> {
    require_surface(fan)?;
    if k == 0 || k_v == 0 {
        return Err(Error::Precondition("k and k_V must be positive".into()));
    }
    let scale = total_scale(c, k);
    let kq = q(k as i64);
    let ch1 = chern_character(&l1.scale(&kq), 2);
    let ch2 = chern_character(&l2.scale(&kq), 2);
    for (i, ch) in [&ch1, &ch2].into_iter().enumerate() {
        let p = parts(fan, c, &scale, ch);
        if mu_rational(&p, &scale).unwrap().is_positive() {
            return Err(Error::Precondition(format!("twisted slope of L{}^k is positive", i + 1)));
        }
    }
    let che = &ch1 + &ch2;
    let ze = -z_bridgeland(fan, c, &scale, &che);
    if ze.is_zero() {
        return Err(Error::Precondition("Z(E_k[1]) vanishes".into()));
    }
    let mut objects: Vec<(String, SurdComplex)> = vec![];
    let m = fan.num_rays();
    for v in 0..m {
        let e = DivisorClass::ray(m, v).scale(&q(k_v as i64)).to_class::<Q>(2).exp_nilpotent();
        let chs = &(&che * &e) - &che;
        objects.push((format!("S_D{v}"), z_bridgeland(fan, c, &scale, &chs)));
    }
    objects.push((format!("L1^{k}[1]"), -z_bridgeland(fan, c, &scale, &ch1)));
    let mut tests = vec![];
    let mut status = Status::Stable;
    let mut witness = None;
    for (name, z) in objects {
        let st = if z.is_zero() {
            Status::Semistable
        } else {
            match cmp_arg(&z, &ze) {
                Ordering::Less => Status::Stable,
                Ordering::Equal => Status::Semistable,
                Ordering::Greater => Status::Unstable,
            }
        };
        if st == Status::Unstable {
            if witness.is_none() {
                witness = Some(name.clone());
            }
            status = Status::Unstable;
        } else if st == Status::Semistable && status == Status::Stable {
            status = Status::Semistable;
        }
        let rel = match st {
            Status::Stable => "<",
            Status::Semistable => "=",
            Status::Unstable => ">",
        };
        tests.push(PhaseTest { object: name, arg: z.arg_f64(), z, relation: rel.into(), status: st });
    }
    let note = match status {
        Status::Unstable => "destabilized".into(),
        _ => "not destabilized by tested objects".into(),
    };
    Ok(RankTwoVerdict { status, witness, k, arg_e_shift: ze.arg_f64(), z_e_shift: ze, tests, note })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_frac;
    use crate::fan::preset_fan;

    fn collins_shi() -> (Fan, ComplexifiedClass, DivisorClass) {
        let f = preset_fan("blp_p2").unwrap();
        let w = DivisorClass::parse(&f, "2,-1@basis(h,e)").unwrap();
        let c = ComplexifiedClass::kahler(&f, w).unwrap().with_sqrt_scale(q_frac(1, 3)).unwrap();
        let l = DivisorClass::parse(&f, "2,0@basis(h,e)").unwrap();
        (f, c, l)
    }

    #[test]
    fn slopes() {
        let (f, c, l) = collins_shi();
        let s = twisted_slope(&f, &c, &chern_character(&l, 2)).unwrap();
        assert_eq!(s, Slope::Finite("4/3*sqrt(3)".parse().unwrap()));
        let s = twisted_slope(&f, &c, &CohClass::one(2)).unwrap();
        assert_eq!(s, Slope::Finite(Surd::zero()));
        let v = Stratum { cone: vec![3], codim: 1 };
        let s = twisted_slope(&f, &c, &s_object_chern(&f, &l, &v, 1, 1).unwrap()).unwrap();
        assert_eq!(s, Slope::Infinite);
        assert!(twisted_slope(&f, &c, &CohClass::zero(2)).is_err());
    }

    #[test]
    fn membership() {
        let (f, c, l) = collins_shi();
        let ch = chern_character(&l, 2);
        assert!(heart_membership(&f, &c, &ch, 0).unwrap().member);
        let m = heart_membership(&f, &c, &ch, 1).unwrap();
        assert!(!m.member);
        assert_eq!(m.reason, "slope > 0");
        assert!(heart_membership(&f, &c, &chern_character(&l.neg(), 2), 1).unwrap().member);
    }

    #[test]
    fn negative_curve_lists() {
        assert!(negative_curves(&preset_fan("p2").unwrap()).unwrap().is_empty());
        let b = negative_curves(&preset_fan("blp_p2").unwrap()).unwrap();
        assert_eq!(b.iter().map(|c| c.ray).collect::<Vec<_>>(), vec![3]);
        let h = negative_curves(&preset_fan("hirzebruch(2)").unwrap()).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].self_intersection, -2);
    }

    #[test]
    fn collins_shi_scan() {
        let (f, c, l) = collins_shi();
        let v1 = arcara_miles_scan(&f, &c, &l, 1).unwrap();
        assert_eq!(v1.status, Status::Stable);
        assert_eq!((v1.tests[0].lhs.as_str(), v1.tests[0].rhs.as_str()), ("1/3", "3/8"));
        assert!(!v1.conditional_on_arcara_miles);
        let v2 = arcara_miles_scan(&f, &c, &l, 2).unwrap();
        assert_eq!(v2.status, Status::Unstable);
        assert_eq!((v2.tests[0].lhs.as_str(), v2.tests[0].rhs.as_str()), ("11/28", "3/8"));
        assert_eq!(v2.witness_rays, vec![3]);
        let scan = k_scan(&f, &c, &l, 50).unwrap();
        assert_eq!(scan.flips, vec![2]);
    }

    #[test]
    fn unscaled_omega_flips_later() {
        let (f, c, l) = collins_shi();
        let c = ComplexifiedClass { omega_sq_scale: Q::one(), ..c };
        let scan = k_scan(&f, &c, &l, 6).unwrap();
        let st: Vec<Status> = scan.verdicts.iter().map(|v| v.status).collect();
        assert_eq!(st[3], Status::Semistable);
        assert_eq!(st[4], Status::Unstable);
        assert_eq!(st[0], Status::Stable);
    }

    #[test]
    fn p2_vacuous_and_conditional() {
        let p2 = preset_fan("p2").unwrap();
        let c = ComplexifiedClass::kahler(&p2, DivisorClass::parse(&p2, "1").unwrap()).unwrap();
        let v = arcara_miles_scan(&p2, &c, &DivisorClass::parse(&p2, "-1").unwrap(), 3).unwrap();
        assert_eq!(v.status, Status::Stable);
        assert_eq!(v.object, "L^3[1]");
        assert!(v.conditional_on_arcara_miles);
        assert!(arcara_miles_scan(&p2, &c, &DivisorClass::zero(3), 1).is_err());
        assert!(arcara_miles_scan(&p2, &c, &DivisorClass::parse(&p2, "-1").unwrap(), 0).is_err());
    }

    #[test]
    fn dictionary_collins_shi() {
        let (f, c, l) = collins_shi();
        // L = −2h, so α = 2h; L^∨ = 2h is nef but not ample
        let r = dhym_bridgeland_dictionary(&f, &c, &l.neg(), 10).unwrap();
        assert_eq!(r.dhym, DhymVerdict::Violated);
        assert_eq!(r.bridgeland, Status::Unstable);
        assert!(r.agree && !r.asserted);
        assert!(r.notes.iter().any(|n| n == "L^∨ not ample"));
    }

    #[test]
    fn s_objects_track_dhym() {
        let f = preset_fan("blp_p2").unwrap();
        let w = DivisorClass::parse(&f, "2,-1@basis(h,e)").unwrap();
        let c = ComplexifiedClass::kahler(&f, w).unwrap().with_sqrt_scale(q_frac(1, 3)).unwrap();
        let l = DivisorClass::parse(&f, "-2,0@basis(h,e)").unwrap();
        let rep = dhym_nakai_moishezon(&f, &c, &l.neg(), Tolerance::Exact).unwrap();
        let checks = s_object_phase_check(&f, &c, &l, 200, 1).unwrap();
        for ch in &checks {
            let d = rep.record(&[ch.ray]).unwrap().verdict;
            assert_eq!(d == DhymVerdict::Positive, ch.status == Status::Stable, "ray {}", ch.ray);
        }
    }

    #[test]
    fn rank_two_symmetric_is_semistable() {
        let p2 = preset_fan("p2").unwrap();
        let c = ComplexifiedClass::kahler(&p2, DivisorClass::parse(&p2, "1").unwrap()).unwrap();
        let l = DivisorClass::parse(&p2, "-1").unwrap();
        let v = higher_rank_instability(&p2, &c, &l, &l, 1).unwrap();
        let sub = v.tests.iter().find(|t| t.object.starts_with("L1")).unwrap();
        assert_eq!(sub.status, Status::Semistable);
        assert!(higher_rank_instability(&p2, &c, &l.neg(), &l, 1).is_err());
    }
}
