//! Central charges, topological angles and the numerical dHYM criteria:
//! Nakai-Moishezon positivity, its phase-inequality form, the Jacob-Sheu
//! windows on Bl_p Pⁿ and the rank-2 inequalities.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::chow::{chern_character, evaluate_top, integrate_over, positivity_cones, CohClass, DivisorClass};
use crate::error::{Error, Result};
use crate::exact::{cmp_arg, cos_sign, fmt_rational, q, q_string, sin_sign, Gauss, Surd, SurdComplex, Q};
use crate::fan::{blp_pn, Fan, Stratum};
use crate::par::{map_slice, Exec};

pub const TORIC_ONLY: &str = "only torus-invariant subvarieties are tested";

/// Kähler class ω (scaled by sqrt(omega_sq_scale)), B-field β and scale k.
/// The effective classes are k·sqrt(s)·ω and k·β.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexifiedClass {
    pub omega: DivisorClass,
    #[serde(with = "q_string")]
    pub omega_sq_scale: Q,
    pub beta: DivisorClass,
    #[serde(with = "q_string")]
    pub k: Q,
}

impl ComplexifiedClass {
    pub fn new(fan: &Fan, omega: DivisorClass, beta: DivisorClass, k: Q) -> Result<Self> {
        if omega.len() != fan.num_rays() || beta.len() != fan.num_rays() {
            return Err(Error::Precondition("class length differs from the number of rays".into()));
        }
        if !k.is_positive() {
            return Err(Error::Precondition("scale k must be positive".into()));
        }
        if !positivity_cones(fan, &omega).is_kahler {
            return Err(Error::Precondition(format!("omega = ({}) is not Kähler", omega.render())));
        }
        Ok(ComplexifiedClass { omega, omega_sq_scale: Q::one(), beta, k })
    }

    /// ω Kähler, β = 0, k = 1.
    pub fn kahler(fan: &Fan, omega: DivisorClass) -> Result<Self> {
        let m = fan.num_rays();
        Self::new(fan, omega, DivisorClass::zero(m), Q::one())
    }

    /// Multiplies ω by sqrt(s), e.g. s = 1/3 for ω = (2h − e)/√3.
    pub fn with_sqrt_scale(mut self, s: Q) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::Precondition("omega scale must be positive".into()));
        }
        self.omega_sq_scale = s;
        Ok(self)
    }

    pub fn with_k(mut self, k: Q) -> Result<Self> {
        if !k.is_positive() {
            return Err(Error::Precondition("scale k must be positive".into()));
        }
        self.k = k;
        Ok(self)
    }

    /// k·sqrt(s), the factor in front of the rational ω.
    pub fn omega_factor(&self) -> Surd {
        Surd::sqrt_of(&self.omega_sq_scale).scale(&self.k)
    }

    pub fn omega_class(&self, n: usize) -> CohClass<Surd> {
        let f = self.omega_factor();
        self.omega.to_class::<Surd>(n).scale(&f)
    }

    pub fn beta_class(&self, n: usize) -> CohClass<Surd> {
        self.beta.to_class::<Surd>(n).scale(&Surd::rational(self.k.clone()))
    }
}

pub fn complexify(re: &CohClass<Surd>, im: &CohClass<Surd>) -> CohClass<SurdComplex> {
    let r = re.map(|x| Gauss::new(x.clone(), Surd::zero()));
    let i = im.map(|x| Gauss::new(Surd::zero(), x.clone()));
    &r + &i
}

fn lift(c: &CohClass<Q>) -> CohClass<SurdComplex> {
    c.map(|x| Gauss::new(Surd::rational(x.clone()), Surd::zero()))
}

/// Z = −∫_X exp(−k(β + iω)) ∪ E.
pub fn central_charge(fan: &Fan, c: &ComplexifiedClass, e: &CohClass<Q>) -> SurdComplex {
    let n = fan.dim();
    let x = complexify(&-&c.beta_class(n), &-&c.omega_class(n));
    -evaluate_top(fan, &(&x.exp_nilpotent() * &lift(e)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleData {
    pub phi: f64,
    pub varphi: f64,
    pub supercritical: bool,
    /// ∫_X (ω + iα)ⁿ
    pub integral: SurdComplex,
    /// cot(varphi), exact, when varphi is not a multiple of π.
    pub cot_varphi: Option<Surd>,
}

fn i_pow(n: usize) -> SurdComplex {
    let one = Surd::one();
    let z = Surd::zero();
    match n % 4 {
        0 => Gauss::new(one, z),
        1 => Gauss::new(z, one),
        2 => Gauss::new(-one, z),
        _ => Gauss::new(z, -one),
    }
}

/// Phase data of ∫(ω + iα)ⁿ at the scale of `c`: both ω and α are multiplied by k.
pub fn topological_angles(fan: &Fan, c: &ComplexifiedClass, alpha: &DivisorClass) -> Result<AngleData> {
    let n = fan.dim();
    let w = c.omega_class(n);
    let a = alpha.to_class::<Surd>(n).scale(&Surd::rational(c.k.clone()));
    let z = evaluate_top(fan, &complexify(&w, &a).pow(n));
    if z.is_zero() {
        return Err(Error::AngleUndefined);
    }
    // e^{i varphi} ∝ iⁿ·conj(Z)
    let wv = i_pow(n) * z.conj();
    let cot = (!wv.im.is_zero()).then(|| wv.re.div(&wv.im));
    let nf = n as f64;
    let (phi, varphi, supercritical) = if n <= 2 {
        let phi = z.arg_f64();
        let varphi = nf * PI / 2.0 - phi;
        (phi, varphi, varphi > 0.0 && varphi < PI && wv.im.is_positive())
    } else if wv.im.is_positive() {
        let varphi = wv.arg_f64();
        (nf * PI / 2.0 - varphi, varphi, true)
    } else {
        let phi = z.arg_f64();
        (phi, nf * PI / 2.0 - phi, false)
    };
    Ok(AngleData { phi, varphi, supercritical, integral: z, cot_varphi: cot })
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "value")]
pub enum Tolerance {
    #[default]
    Exact,
    Float(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Positive,
    Semistable,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumRecord {
    pub cone: Vec<usize>,
    pub codim: usize,
    pub lhs: String,
    pub lhs_f64: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub overall: Verdict,
    pub generic: bool,
    pub strata: Vec<StratumRecord>,
    pub witnesses: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cot_varphi: Option<String>,
    pub assumptions: Vec<String>,
}

impl StabilityReport {
    fn assemble(strata: Vec<StratumRecord>, cot: Option<String>) -> Self {
        let witnesses: Vec<Vec<usize>> =
            strata.iter().filter(|r| r.verdict == Verdict::Violated).map(|r| r.cone.clone()).collect();
        let generic = strata.iter().all(|r| r.verdict != Verdict::Semistable);
        let overall = if !witnesses.is_empty() {
            Verdict::Violated
        } else if generic {
            Verdict::Positive
        } else {
            Verdict::Semistable
        };
        StabilityReport { overall, generic, strata, witnesses, cot_varphi: cot, assumptions: vec![TORIC_ONLY.into()] }
    }

    pub fn record(&self, cone: &[usize]) -> Option<&StratumRecord> {
        self.strata.iter().find(|r| r.cone == cone)
    }

    pub fn verdicts(&self) -> Vec<Verdict> {
        self.strata.iter().map(|r| r.verdict).collect()
    }
}

fn classify(x: &Surd, tol: Tolerance) -> Verdict {
    match tol {
        Tolerance::Exact => match x.signum() {
            1 => Verdict::Positive,
            0 => Verdict::Semistable,
            _ => Verdict::Violated,
        },
        Tolerance::Float(t) => {
            let v = x.to_f64();
            if v.abs() <= t {
                Verdict::Semistable
            } else if v > 0.0 {
                Verdict::Positive
            } else {
                Verdict::Violated
            }
        }
    }
}

fn require_cot(fan: &Fan, ang: &AngleData) -> Result<Surd> {
    if fan.dim() > 2 && !ang.supercritical {
        return Err(Error::NotSupercritical(format!(
            "varphi = {:.6} is outside (0, π); the branch pairing is not determined for n = {}",
            ang.varphi,
            fan.dim()
        )));
    }
    ang.cot_varphi.clone().ok_or(Error::AngleUndefined)
}

fn nm_report(
    fan: &Fan,
    c: &ComplexifiedClass,
    u: &CohClass<SurdComplex>,
    cot: &Surd,
    sign: Surd,
    tol: Tolerance,
) -> StabilityReport {
    let n = fan.dim();
    let pows: Vec<CohClass<SurdComplex>> = (0..=n).map(|d| u.pow(d)).collect();
    let strata = fan.enumerate_strata();
    let _ = c;
    let records = map_slice(Exec::default(), &strata, |s: &Stratum| {
        let p = integrate_over(fan, &pows[s.dim(n)], &s.cone);
        let lhs = p.re.clone() + sign.clone() * cot.clone() * p.im.clone();
        StratumRecord {
            cone: s.cone.clone(),
            codim: s.codim,
            lhs: lhs.to_string(),
            lhs_f64: lhs.to_f64(),
            verdict: classify(&lhs, tol),
            detail: None,
        }
    });
    StabilityReport::assemble(records, Some(cot.to_string()))
}

/// ∫_V Re(iω+α)^{dim V} − cot(varphi)·∫_V Im(iω+α)^{dim V} over all toric strata,
/// at (kω, kα).
pub fn dhym_nakai_moishezon(
    fan: &Fan,
    c: &ComplexifiedClass,
    alpha: &DivisorClass,
    tol: Tolerance,
) -> Result<StabilityReport> {
    let n = fan.dim();
    let ang = topological_angles(fan, c, alpha)?;
    let cot = require_cot(fan, &ang)?;
    let a = alpha.to_class::<Surd>(n).scale(&Surd::rational(c.k.clone()));
    let u = complexify(&a, &c.omega_class(n));
    Ok(nm_report(fan, c, &u, &cot, -Surd::one(), tol))
}

/// The criterion for the conjugate equation Im(e^{iφ}(ω − ia)ⁿ) = 0, with
/// ∫(ω − ia)ⁿ ∈ e^{−iφ}ℝ₊, evaluated on conjugated integrals. Verdicts agree
/// with `dhym_nakai_moishezon` for α = a.
pub fn negative_dhym_nakai_moishezon(
    fan: &Fan,
    c: &ComplexifiedClass,
    a: &DivisorClass,
    tol: Tolerance,
) -> Result<StabilityReport> {
    let n = fan.dim();
    let w = c.omega_class(n);
    let av = a.to_class::<Surd>(n).scale(&Surd::rational(c.k.clone()));
    // ∫(ω − ia)ⁿ = e^{−iφ}r, and the phase angle of the conjugate problem
    let z = evaluate_top(fan, &complexify(&w, &-&av).pow(n));
    if z.is_zero() {
        return Err(Error::AngleUndefined);
    }
    let wv = i_pow(n) * z.clone();
    let ang = AngleData {
        phi: -z.arg_f64(),
        varphi: n as f64 * PI / 2.0 + z.arg_f64(),
        supercritical: wv.im.is_positive(),
        integral: z,
        cot_varphi: (!wv.im.is_zero()).then(|| wv.re.div(&wv.im)),
    };
    let cot = require_cot(fan, &ang)?;
    // integrand conj(iω + a) = a − iω
    let u = complexify(&av, &-&w);
    Ok(nm_report(fan, c, &u, &cot, Surd::one(), tol))
}

fn e_minus_i_omega_ch(fan: &Fan, c: &ComplexifiedClass, l: &DivisorClass) -> CohClass<SurdComplex> {
    let n = fan.dim();
    let lk = l.to_class::<Surd>(n).scale(&Surd::rational(c.k.clone()));
    complexify(&lk, &-&c.omega_class(n)).exp_nilpotent()
}

/// arg((−1)^{codim V}∫_V e^{−iω}ch(L)) < arg(∫_X e^{−iω}ch(L)) on principal
/// arguments, with α = −L.
pub fn phase_inequality_form(fan: &Fan, c: &ComplexifiedClass, l: &DivisorClass) -> Result<StabilityReport> {
    let ang = topological_angles(fan, c, &l.neg())?;
    let cot = require_cot(fan, &ang)?;
    let e = e_minus_i_omega_ch(fan, c, l);
    let ux = evaluate_top(fan, &e);
    if ux.is_zero() {
        return Err(Error::AngleUndefined);
    }
    let strata = fan.enumerate_strata();
    let recs: Vec<Result<StratumRecord>> = map_slice(Exec::default(), &strata, |s: &Stratum| {
        let mut uv = integrate_over(fan, &e, &s.cone);
        if s.codim % 2 == 1 {
            uv = -uv;
        }
        if uv.is_zero() {
            return Err(Error::AngleUndefined);
        }
        let verdict = match cmp_arg(&uv, &ux) {
            Ordering::Less => Verdict::Positive,
            Ordering::Equal => Verdict::Semistable,
            Ordering::Greater => Verdict::Violated,
        };
        let diff = ux.arg_f64() - uv.arg_f64();
        Ok(StratumRecord {
            cone: s.cone.clone(),
            codim: s.codim,
            lhs: format!("{diff:.15}"),
            lhs_f64: diff,
            verdict,
            detail: Some(format!("(-1)^codim int_V = {uv}; int_X = {ux}")),
        })
    });
    let recs = recs.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(StabilityReport::assemble(recs, Some(cot.to_string())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobSheuReport {
    pub theta_hat: f64,
    /// L numerically trivial: α = 0 solves the equation outright.
    pub trivial: bool,
    pub report: StabilityReport,
}

/// Windows θ̂ − π/2 < arg(−∫_V e^{−iω}ch(L^∨)) < θ̂ + π/2 on Bl_p Pⁿ.
pub fn jacob_sheu_check(fan: &Fan, c: &ComplexifiedClass, l: &DivisorClass) -> Result<JacobSheuReport> {
    let n = fan.dim();
    if n < 2 || !fan.same_fan(&blp_pn(n)?) {
        return Err(Error::Precondition("fan is not Bl_p Pⁿ".into()));
    }
    let dual = l.neg();
    let curves = fan.curves();
    let trivial = curves.iter().all(|cv| crate::chow::divisor_dot_curve(fan, &dual, cv).is_zero());
    if !trivial && !positivity_cones(fan, &dual).is_kahler {
        return Err(Error::Precondition(format!("L^∨ = ({}) is not ample", dual.render())));
    }
    let e = e_minus_i_omega_ch(fan, c, &dual);
    let wx = -evaluate_top(fan, &e);
    if wx.is_zero() {
        return Err(Error::AngleUndefined);
    }
    let theta_hat = wx.arg_f64().rem_euclid(2.0 * PI);
    let recs: Vec<StratumRecord> = fan
        .enumerate_strata()
        .into_iter()
        .filter(|s| s.codim == 1)
        .map(|s| {
            let wv = -integrate_over(fan, &e, &s.cone);
            let cs = cos_sign(&wv, &wx);
            let verdict = if trivial {
                Verdict::Positive
            } else {
                match cs {
                    1 => Verdict::Positive,
                    0 => Verdict::Semistable,
                    _ => Verdict::Violated,
                }
            };
            let diff = (wv.arg_f64() - theta_hat + PI).rem_euclid(2.0 * PI) - PI;
            StratumRecord {
                cone: s.cone.clone(),
                codim: 1,
                lhs: format!("{diff:.15}"),
                lhs_f64: diff,
                verdict,
                detail: Some(format!("-int_V = {wv}")),
            }
        })
        .collect();
    Ok(JacobSheuReport { theta_hat, trivial, report: StabilityReport::assemble(recs, None) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankTwoTest {
    pub object: String,
    pub cone: Vec<usize>,
    pub z: SurdComplex,
    /// Sign-carrying quantity: Im(Z·conj(Z_X(E))).
    pub value: String,
    pub arg_offset: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HigherRankReport {
    pub k: u64,
    pub z_x: SurdComplex,
    pub arg_z_x: f64,
    pub tests: Vec<RankTwoTest>,
    pub overall: Verdict,
}

fn z_dhym(fan: &Fan, c: &ComplexifiedClass, k: &Q, ch: &CohClass<Q>, cone: &[usize]) -> SurdComplex {
    let n = fan.dim();
    let kk = Surd::rational(k.clone());
    let w = c.omega_class(n).scale(&kk);
    let b = c.beta_class(n).scale(&kk);
    let x = complexify(&-&b, &-&w).exp_nilpotent();
    let v = integrate_over(fan, &(&x * &lift(ch)), cone);
    // −i·v
    Gauss::new(v.im.clone(), -v.re)
}

/// For E = L₁ ⊕ L₂ at scale k: arg Z_X(E) < arg Z_V(E|_V) < arg Z_X(E) + π on
/// toric curves V, and arg Z_X(E) − π < arg Z_X(L₁) < arg Z_X(E), with
/// Z^dHYM(F) = −i∫ e^{−iω}e^{−β}ch(F).
pub fn higher_rank_inequalities(
    fan: &Fan,
    c: &ComplexifiedClass,
    l1: &DivisorClass,
    l2: &DivisorClass,
    k: u64,
) -> Result<HigherRankReport> {
    let n = fan.dim();
    if n != 2 {
        return Err(Error::NotSurface(n));
    }
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let kq = q(k as i64);
    let ch1 = chern_character(&l1.scale(&kq), n);
    let ch2 = chern_character(&l2.scale(&kq), n);
    let che = &ch1 + &ch2;
    let one = Q::one();
    let zx = z_dhym(fan, c, &one, &che, &[]);
    if zx.is_zero() {
        return Err(Error::Precondition("Z_X(E) vanishes".into()));
    }
    let ax = zx.arg_f64();
    let offset = |z: &SurdComplex| (z.arg_f64() - ax).rem_euclid(2.0 * PI);
    let mut tests = vec![];
    for cv in fan.curves() {
        let zv = z_dhym(fan, c, &one, &che, &cv);
        let s = sin_sign(&zv, &zx);
        let im = zv.im.clone() * zx.re.clone() - zv.re.clone() * zx.im.clone();
        tests.push(RankTwoTest {
            object: "E|_V".into(),
            cone: cv.clone(),
            value: im.to_string(),
            arg_offset: offset(&zv),
            z: zv,
            verdict: match s {
                1 => Verdict::Positive,
                0 => Verdict::Semistable,
                _ => Verdict::Violated,
            },
        });
    }
    let zl = z_dhym(fan, c, &one, &ch1, &[]);
    let im = zl.im.clone() * zx.re.clone() - zl.re.clone() * zx.im.clone();
    let s = if zl.is_zero() { 0 } else { sin_sign(&zl, &zx) };
    tests.push(RankTwoTest {
        object: "L1".into(),
        cone: vec![],
        value: im.to_string(),
        arg_offset: offset(&zl),
        z: zl,
        verdict: match s {
            -1 => Verdict::Positive,
            0 => Verdict::Semistable,
            _ => Verdict::Violated,
        },
    });
    let overall = if tests.iter().any(|t| t.verdict == Verdict::Violated) {
        Verdict::Violated
    } else if tests.iter().any(|t| t.verdict == Verdict::Semistable) {
        Verdict::Semistable
    } else {
        Verdict::Positive
    };
    Ok(HigherRankReport { k, arg_z_x: ax, z_x: zx, tests, overall })
}

/// ch(S(kL, k_V V)) = ch(L^k(k_V V)) − ch(L^k) for a toric divisor V.
pub fn s_object_chern(fan: &Fan, l: &DivisorClass, v: &Stratum, k: u64, kv: u64) -> Result<CohClass<Q>> {
    if v.codim != 1 {
        return Err(Error::Unsupported("S-objects are built for divisor strata only".into()));
    }
    let n = fan.dim();
    let lk = l.scale(&q(k as i64));
    let twist = lk.add(&DivisorClass::ray(fan.num_rays(), v.cone[0]).scale(&q(kv as i64)));
    Ok(&chern_character(&twist, n) - &chern_character(&lk, n))
}

/// Rendered rational or surd.
pub fn render_q(x: &Q) -> String {
    fmt_rational(x)
}
