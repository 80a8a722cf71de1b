//! Minimal angle on toric surfaces: the supremum of
//! g(t) = ((α − D)² − ω²)/(2(α − D)·ω) over effective D = Σ tᵢDᵢ, with the
//! maximizing divisor, rationality detection and the weak positivity test.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chow::{combinations, dot, nef_generators, DivisorClass};
use crate::error::{Error, Result};
use crate::exact::{best_rational, fmt_rational, parse_rational, q, q_string, q_to_f64, Surd, Q};
use crate::fan::Fan;
use crate::par::{map_slice, Exec};

pub const DEFAULT_SEED: u64 = 0x5eed_0001;
pub const CERT_SAMPLES: usize = 10_000;

mod q_mat_string {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(fmt_rational).collect()).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Q>>, D::Error> {
        let v: Vec<Vec<String>> = Vec::deserialize(d)?;
        v.iter().map(|r| r.iter().map(|x| parse_rational(x).map_err(serde::de::Error::custom)).collect()).collect()
    }
}

fn require_surface(fan: &Fan) -> Result<()> {
    if fan.dim() != 2 {
        return Err(Error::NotSurface(fan.dim()));
    }
    Ok(())
}

/// (α² − ω²)/(2α·ω) on a surface.
pub fn cot_phi(fan: &Fan, omega: &DivisorClass, alpha: &DivisorClass) -> Result<Q> {
    require_surface(fan)?;
    let aw = dot(fan, alpha, omega);
    if !aw.is_positive() {
        return Err(Error::Precondition("alpha·omega must be positive".into()));
    }
    Ok((dot(fan, alpha, alpha) - dot(fan, omega, omega)) / (q(2) * aw))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinAngleResult {
    pub cot_theta_min: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cot_theta_min_exact: Option<Surd>,
    pub d_star: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_star_exact: Option<Vec<Surd>>,
    pub support: Vec<usize>,
    pub attained: bool,
    #[serde(with = "q_string")]
    pub cot_phi: Q,
    pub gap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_exact: Option<Surd>,
    /// Exact support solve agrees with ascent and sampling.
    pub certified: bool,
    /// Other supports reaching the optimum within 1e−9.
    pub ties: Vec<Vec<usize>>,
    pub ascent_value: f64,
    pub samples: usize,
    pub sample_max: f64,
    #[serde(with = "crate::exact::q_vec_string")]
    pub omega: Vec<Q>,
    #[serde(with = "crate::exact::q_vec_string")]
    pub alpha: Vec<Q>,
    /// D_i·D_j over all toric divisors.
    #[serde(with = "q_mat_string")]
    pub pairing: Vec<Vec<Q>>,
}

/// Intersection data in toric-divisor coordinates.
struct Data {
    m: usize,
    g: Vec<Vec<Q>>,
    a: Vec<Q>,
    w: Vec<Q>,
    aa: Q,
    aw: Q,
    ww: Q,
}

impl Data {
    fn new(fan: &Fan, omega: &DivisorClass, alpha: &DivisorClass) -> Self {
        let m = fan.num_rays();
        let ray = |i| DivisorClass::ray(m, i);
        let g = (0..m).map(|i| (0..m).map(|j| dot(fan, &ray(i), &ray(j))).collect()).collect();
        Data {
            m,
            g,
            a: (0..m).map(|i| dot(fan, alpha, &ray(i))).collect(),
            w: (0..m).map(|i| dot(fan, omega, &ray(i))).collect(),
            aa: dot(fan, alpha, alpha),
            aw: dot(fan, alpha, omega),
            ww: dot(fan, omega, omega),
        }
    }

    fn from_result(r: &MinAngleResult) -> Self {
        let m = r.pairing.len();
        let mv = |x: &[Q], y: &[Q]| -> Q {
            let mut s = Q::zero();
            for i in 0..m {
                for j in 0..m {
                    s += &x[i] * &r.pairing[i][j] * &y[j];
                }
            }
            s
        };
        let e = |i: usize| -> Vec<Q> { (0..m).map(|j| if i == j { Q::one() } else { Q::zero() }).collect() };
        // classes given in ray coordinates
        Data {
            m,
            g: r.pairing.clone(),
            a: (0..m).map(|i| mv(&r.alpha, &e(i))).collect(),
            w: (0..m).map(|i| mv(&r.omega, &e(i))).collect(),
            aa: mv(&r.alpha, &r.alpha),
            aw: mv(&r.alpha, &r.omega),
            ww: mv(&r.omega, &r.omega),
        }
    }

    /// (β², β·ω) for β = α − Σ tᵢDᵢ, exact.
    fn beta_q(&self, t: &[Q]) -> (Q, Q) {
        let mut bb = self.aa.clone();
        let mut bw = self.aw.clone();
        for i in 0..self.m {
            if t[i].is_zero() {
                continue;
            }
            bb -= q(2) * &t[i] * &self.a[i];
            bw -= &t[i] * &self.w[i];
            for j in 0..self.m {
                bb += &t[i] * &self.g[i][j] * &t[j];
            }
        }
        (bb, bw)
    }

    fn g_q(&self, t: &[Q]) -> Option<Q> {
        let (bb, bw) = self.beta_q(t);
        bw.is_positive().then(|| (bb - &self.ww) / (q(2) * bw))
    }

    fn floats(&self) -> FData {
        let f = |v: &[Q]| v.iter().map(q_to_f64).collect::<Vec<f64>>();
        FData {
            m: self.m,
            g: self.g.iter().map(|r| f(r)).collect(),
            a: f(&self.a),
            w: f(&self.w),
            aa: q_to_f64(&self.aa),
            aw: q_to_f64(&self.aw),
            ww: q_to_f64(&self.ww),
        }
    }
}

struct FData {
    m: usize,
    g: Vec<Vec<f64>>,
    a: Vec<f64>,
    w: Vec<f64>,
    aa: f64,
    aw: f64,
    ww: f64,
}

impl FData {
    /// (β², β·ω, β·D_j for all j)
    fn beta(&self, t: &[f64]) -> (f64, f64, Vec<f64>) {
        let mut bd: Vec<f64> = self.a.clone();
        for j in 0..self.m {
            for i in 0..self.m {
                bd[j] -= t[i] * self.g[i][j];
            }
        }
        let bw = self.aw - t.iter().zip(&self.w).map(|(x, y)| x * y).sum::<f64>();
        // β² = α·β − Σ tᵢ β·Dᵢ, with α·β = α² − Σ tᵢ α·Dᵢ
        let ab = self.aa - t.iter().zip(&self.a).map(|(x, y)| x * y).sum::<f64>();
        let bb = ab - t.iter().zip(&bd).map(|(x, y)| x * y).sum::<f64>();
        (bb, bw, bd)
    }

    fn g(&self, t: &[f64]) -> Option<f64> {
        let (bb, bw, _) = self.beta(t);
        (bw > 0.0).then(|| (bb - self.ww) / (2.0 * bw))
    }

    /// ∂g/∂t_j = (g·ω·D_j − β·D_j)/(β·ω)
    fn grad(&self, t: &[f64]) -> Option<(f64, Vec<f64>)> {
        let (bb, bw, bd) = self.beta(t);
        if bw <= 0.0 {
            return None;
        }
        let g = (bb - self.ww) / (2.0 * bw);
        Some((g, (0..self.m).map(|j| (g * self.w[j] - bd[j]) / bw).collect()))
    }

    /// Uniform-ish point of {t ≥ 0, Σ tᵢ ω·Dᵢ < α·ω}.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let e: Vec<f64> = (0..self.m).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
        let s: f64 = e.iter().sum();
        let r: f64 = rng.gen::<f64>();
        // a random subset of coordinates is zeroed so faces get sampled too
        let mask: Vec<bool> = (0..self.m).map(|_| rng.gen_bool(0.7)).collect();
        (0..self.m).map(|i| if mask[i] { r * self.aw * e[i] / (s * self.w[i]) } else { 0.0 }).collect()
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    support: Vec<usize>,
    c: Surd,
    t: Vec<Surd>,
}

/// Reduced row echelon solve of K x = b; returns a particular solution and a null-space basis.
fn affine_solutions(k: &[Vec<Q>], b: &[Q]) -> Option<(Vec<Q>, Vec<Vec<Q>>)> {
    let rows = k.len();
    let cols = k.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<Q>> = k.iter().zip(b).map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect()).collect();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let piv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &piv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut part = vec![Q::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        part[c] = m[i][cols].clone();
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let null = free
        .iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -m[i][f].clone();
            }
            v
        })
        .collect();
    Some((part, null))
}

/// Stationary points of g on the relative interior of the face spanned by S:
/// (α − D)·D_j = c·ω·D_j for j ∈ S, with c = g(t).
fn support_candidates(d: &Data, s: &[usize]) -> Vec<Candidate> {
    let k: Vec<Vec<Q>> =
        s.iter().map(|&j| s.iter().map(|&i| d.g[i][j].clone()).chain([d.w[j].clone()]).collect()).collect();
    let b: Vec<Q> = s.iter().map(|&j| d.a[j].clone()).collect();
    let Some((p, null)) = affine_solutions(&k, &b) else { return vec![] };
    if null.len() != 1 {
        return vec![];
    }
    let r = &null[0];
    let ns = s.len();
    let at = |lam: &Q| -> (Vec<Q>, Q) {
        let x: Vec<Q> = p.iter().zip(r).map(|(a, b)| a + lam * b).collect();
        let mut t = vec![Q::zero(); d.m];
        for (i, &ri) in s.iter().enumerate() {
            t[ri] = x[i].clone();
        }
        (t, x[ns].clone())
    };
    // F(λ) = 2c·β·ω − β² + ω², quadratic in λ
    let f = |lam: Q| -> Q {
        let (t, c) = at(&lam);
        let (bb, bw) = d.beta_q(&t);
        q(2) * c * bw - bb + &d.ww
    };
    let (f0, f1, fm) = (f(Q::zero()), f(Q::one()), f(-Q::one()));
    let qa = (&f1 + &fm) / q(2) - &f0;
    let qb = (&f1 - &fm) / q(2);
    let qc = f0;
    let roots: Vec<Surd> = if qa.is_zero() {
        if qb.is_zero() {
            return vec![];
        }
        vec![Surd::rational(-qc / qb)]
    } else {
        let disc = &qb * &qb - q(4) * &qa * &qc;
        if disc.is_negative() {
            return vec![];
        }
        let base = Surd::rational(-&qb / (q(2) * &qa));
        let sq = Surd::sqrt_of(&disc).scale(&(Q::one() / (q(2) * &qa)));
        if sq.is_zero() {
            vec![base]
        } else {
            vec![base.clone() + sq.clone(), base - sq]
        }
    };
    let mut out = vec![];
    for lam in roots {
        let lift = |v: &Q, dv: &Q| Surd::rational(v.clone()) + lam.scale(dv);
        let mut t = vec![Surd::zero(); d.m];
        let mut ok = true;
        for (i, &ri) in s.iter().enumerate() {
            t[ri] = lift(&p[i], &r[i]);
            ok &= t[ri].is_positive();
        }
        let c = lift(&p[ns], &r[ns]);
        let mut bw = Surd::rational(d.aw.clone());
        for &ri in s {
            bw = bw - t[ri].scale(&d.w[ri]);
        }
        if ok && bw.is_positive() {
            out.push(Candidate { support: s.to_vec(), c, t });
        }
    }
    out
}

fn cmp_surd(x: &Surd, y: &Surd) -> Ordering {
    if x.is_rational() || y.is_rational() || x.d == y.d {
        x.cmp_exact(y)
    } else {
        x.to_f64().partial_cmp(&y.to_f64()).unwrap_or(Ordering::Equal)
    }
}

fn ascend(fd: &FData, mut t: Vec<f64>) -> (f64, Vec<f64>) {
    let Some((mut g, mut grad)) = fd.grad(&t) else { return (f64::NEG_INFINITY, t) };
    for _ in 0..20_000 {
        let pg: Vec<f64> = (0..fd.m).map(|j| if t[j] <= 0.0 && grad[j] < 0.0 { 0.0 } else { grad[j] }).collect();
        if pg.iter().fold(0.0f64, |a, x| a.max(x.abs())) < 1e-12 {
            break;
        }
        let mut step = 0.1;
        let mut moved = false;
        while step > 1e-16 {
            let cand: Vec<f64> = (0..fd.m).map(|j| (t[j] + step * grad[j]).max(0.0)).collect();
            if let Some((gn, gr)) = fd.grad(&cand) {
                if gn > g {
                    t = cand;
                    g = gn;
                    grad = gr;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (g, t)
}

pub fn minimal_angle(fan: &Fan, omega: &DivisorClass, alpha: &DivisorClass) -> Result<MinAngleResult> {
    minimal_angle_with(Exec::default(), fan, omega, alpha, DEFAULT_SEED)
}

pub fn minimal_angle_with(
    exec: Exec,
    fan: &Fan,
    omega: &DivisorClass,
    alpha: &DivisorClass,
    seed: u64,
) -> Result<MinAngleResult> {
    let cphi = cot_phi(fan, omega, alpha)?;
    let d = Data::new(fan, omega, alpha);
    let m = d.m;
    let rho = fan.picard_rank();
    let supports: Vec<Vec<usize>> = (1..=rho.min(m)).flat_map(|k| combinations(m, k)).collect();
    let per_support = map_slice(exec, &supports, |s: &Vec<usize>| support_candidates(&d, s));
    // candidates in (support size, lex) order; the first maximum wins ties
    let mut cands = vec![Candidate { support: vec![], c: Surd::rational(cphi.clone()), t: vec![Surd::zero(); m] }];
    cands.extend(per_support.into_iter().flatten());
    let mut best = 0;
    for (i, c) in cands.iter().enumerate() {
        if cmp_surd(&c.c, &cands[best].c) == Ordering::Greater {
            best = i;
        }
    }
    let best_f = cands[best].c.to_f64();
    let mut ties: Vec<Vec<usize>> = vec![];
    for (i, c) in cands.iter().enumerate() {
        if i != best
            && (c.c.to_f64() - best_f).abs() <= 1e-9
            && !ties.contains(&c.support)
            && c.support != cands[best].support
        {
            ties.push(c.support.clone());
        }
    }

    let fd = d.floats();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = vec![vec![0.0; m]];
    for _ in 0..8 {
        starts.push(fd.sample(&mut rng));
    }
    let ascents = map_slice(exec, &starts, |s: &Vec<f64>| ascend(&fd, s.clone()));
    let (ascent_value, ascent_t) =
        ascents.into_iter().fold((f64::NEG_INFINITY, vec![]), |acc, x| if x.0 > acc.0 { x } else { acc });

    let mut sample_max = f64::NEG_INFINITY;
    for _ in 0..CERT_SAMPLES {
        let t = fd.sample(&mut rng);
        if let Some(g) = fd.g(&t) {
            sample_max = sample_max.max(g);
        }
    }

    let exact_ok = best_f >= ascent_value - 1e-9 && best_f >= sample_max - 1e-9;
    let cphi_f = q_to_f64(&cphi);
    let res = if exact_ok {
        let c = cands[best].clone();
        let gap_exact = c.c.clone() - Surd::rational(cphi.clone());
        MinAngleResult {
            cot_theta_min: best_f,
            d_star: c.t.iter().map(Surd::to_f64).collect(),
            d_star_exact: Some(c.t),
            support: c.support,
            attained: true,
            cot_phi: cphi,
            gap: gap_exact.to_f64(),
            gap_exact: Some(gap_exact),
            cot_theta_min_exact: Some(c.c),
            certified: true,
            ties,
            ascent_value,
            samples: CERT_SAMPLES,
            sample_max,
            omega: omega.coeffs.clone(),
            alpha: alpha.coeffs.clone(),
            pairing: d.g.clone(),
        }
    } else {
        let support = (0..m).filter(|&i| ascent_t[i] > 0.0).collect();
        MinAngleResult {
            cot_theta_min: ascent_value,
            cot_theta_min_exact: None,
            d_star: ascent_t,
            d_star_exact: None,
            support,
            attained: true,
            cot_phi: cphi,
            gap: ascent_value - cphi_f,
            gap_exact: None,
            certified: false,
            ties,
            ascent_value,
            samples: CERT_SAMPLES,
            sample_max,
            omega: omega.coeffs.clone(),
            alpha: alpha.coeffs.clone(),
            pairing: d.g.clone(),
        }
    };
    Ok(res)
}

/// A rational divisor with denominators ≤ `max_den` attaining cot θ_min
/// within 1e−9, when one exists.
pub fn rationality_round(r: &MinAngleResult, max_den: u64) -> Option<Vec<Q>> {
    if !r.attained {
        return None;
    }
    if let Some(ex) = &r.d_star_exact {
        if ex.iter().all(Surd::is_rational) {
            let v: Vec<Q> = ex.iter().map(|s| s.a.clone()).collect();
            let max = num_bigint::BigInt::from(max_den);
            if v.iter().all(|x| x.denom() <= &max) {
                return Some(v);
            }
        } else {
            return None;
        }
    }
    let d = Data::from_result(r);
    let v: Vec<Q> = r.d_star.iter().map(|&x| best_rational(x, max_den)).collect();
    let close = v.iter().zip(&r.d_star).all(|(a, b)| (q_to_f64(a) - b).abs() <= 1e-9);
    let g = d.g_q(&v)?;
    (close && (q_to_f64(&g) - r.cot_theta_min).abs() <= 1e-9).then_some(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiCheck {
    pub name: String,
    pub value: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemipositivityReport {
    pub passes: bool,
    pub checks: Vec<SemiCheck>,
    /// Failing checks, then checks holding with equality.
    pub witnesses: Vec<String>,
    pub zero_witnesses: Vec<String>,
}

/// Weak dHYM inequalities: ∫_X at k = 2, (α − cot φ·ω)·D_j ≥ 0 on toric
/// curves, and (α − cot φ·ω)·γ ≥ 0 on nef generators γ.
pub fn semipositivity_check(fan: &Fan, omega: &DivisorClass, alpha: &DivisorClass) -> Result<SemipositivityReport> {
    let cot = cot_phi(fan, omega, alpha)?;
    let x = alpha.sub(&omega.scale(&cot));
    let mut checks = vec![];
    // Re(iω+α)² − cot·Im(iω+α)² = α² − ω² − 2cot·α·ω
    let global = dot(fan, alpha, alpha) - dot(fan, omega, omega) - q(2) * &cot * dot(fan, alpha, omega);
    checks.push(SemiCheck { name: "X".into(), ok: !global.is_negative(), value: fmt_rational(&global) });
    let m = fan.num_rays();
    for i in 0..m {
        let v = dot(fan, &x, &DivisorClass::ray(m, i));
        checks.push(SemiCheck { name: format!("D{i}"), ok: !v.is_negative(), value: fmt_rational(&v) });
    }
    for (i, g) in nef_generators(fan).iter().enumerate() {
        let v = dot(fan, &x, g);
        checks.push(SemiCheck {
            name: format!("nef{i}({})", g.render()),
            ok: !v.is_negative(),
            value: fmt_rational(&v),
        });
    }
    let witnesses: Vec<String> = checks.iter().filter(|c| !c.ok).map(|c| c.name.clone()).collect();
    let zero_witnesses = checks.iter().filter(|c| c.value == "0").map(|c| c.name.clone()).collect();
    Ok(SemipositivityReport { passes: witnesses.is_empty(), checks, witnesses, zero_witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_frac;
    use crate::fan::preset_fan;

    fn example() -> (Fan, DivisorClass, DivisorClass) {
        let f = preset_fan("blp_p2").unwrap();
        let w = DivisorClass::parse(&f, "2,-1@basis(h,e)").unwrap();
        let a = DivisorClass::parse(&f, "5,-1@basis(h,e)").unwrap();
        (f, w, a)
    }

    #[test]
    fn cot_phi_examples() {
        let (f, w, a) = example();
        assert_eq!(cot_phi(&f, &w, &a).unwrap(), q_frac(7, 6));
        assert_eq!(cot_phi(&f, &w, &w).unwrap(), Q::zero());
        let e = DivisorClass::parse(&f, "0,1@basis(h,e)").unwrap();
        // ω·(h − 2e) = 2 − 2 = 0
        let z = DivisorClass::parse(&f, "1,-2@basis(h,e)").unwrap();
        assert!(cot_phi(&f, &w, &z).is_err());
        assert!(cot_phi(&f, &w, &e).is_ok());
    }

    #[test]
    fn blp_p2_minimal_angle() {
        let (f, w, a) = example();
        let r = minimal_angle(&f, &w, &a).unwrap();
        assert_eq!(r.cot_theta_min_exact.as_ref().unwrap().to_string(), "10 - sqrt(78)");
        assert_eq!(r.support, vec![3]);
        assert_eq!(r.d_star_exact.as_ref().unwrap()[3].to_string(), "9 - sqrt(78)");
        assert!(r.certified && r.gap > 0.0);
        assert!((r.ascent_value - r.cot_theta_min).abs() < 1e-9);
        assert!(r.sample_max <= r.cot_theta_min + 1e-9);
        assert_eq!(rationality_round(&r, 1000), None);
        let s = semipositivity_check(&f, &w, &a).unwrap();
        assert!(!s.passes);
    }

    #[test]
    fn stationary_identity() {
        // (α − D)·E = cot θ_min·(ω·E) at the optimum
        let (f, w, a) = example();
        let r = minimal_angle(&f, &w, &a).unwrap();
        let t = r.d_star_exact.unwrap()[3].clone();
        let c = r.cot_theta_min_exact.unwrap();
        let e = DivisorClass::ray(4, 3);
        let lhs = Surd::rational(dot(&f, &a, &e)) - t.scale(&dot(&f, &e, &e));
        assert_eq!(lhs, c.scale(&dot(&f, &w, &e)));
        assert_eq!(c.clone() * c.clone() - c.scale(&q(20)) + Surd::rational(q(22)), Surd::zero());
    }

    #[test]
    fn p2_no_twist() {
        let p2 = preset_fan("p2").unwrap();
        let r = minimal_angle(&p2, &DivisorClass::from_ints(&[0, 0, 1]), &DivisorClass::from_ints(&[0, 0, 3])).unwrap();
        assert!(r.support.is_empty());
        assert_eq!(r.cot_theta_min_exact.clone().unwrap(), Surd::rational(q_frac(4, 3)));
        assert_eq!(rationality_round(&r, 10), Some(vec![Q::zero(); 3]));
    }

    #[test]
    fn semipositive_has_zero_gap() {
        let (f, w, _) = example();
        let a = DivisorClass::parse(&f, "3,-1@basis(h,e)").unwrap();
        let s = semipositivity_check(&f, &w, &a).unwrap();
        assert!(s.passes);
        assert_eq!(s.checks[0].value, "0");
        let r = minimal_angle(&f, &w, &a).unwrap();
        assert!(r.support.is_empty());
        assert_eq!(r.gap_exact.unwrap(), Surd::zero());
    }

    #[test]
    fn planted_rational_optimum() {
        // ω = 3h − e, α = 7h + 2e: the E-quadratic c² − 42c + 41 = 0 has the root 1
        let f = preset_fan("blp_p2").unwrap();
        let w = DivisorClass::parse(&f, "3,-1@basis(h,e)").unwrap();
        let a = DivisorClass::parse(&f, "7,2@basis(h,e)").unwrap();
        let r = minimal_angle(&f, &w, &a).unwrap();
        assert_eq!(r.support, vec![3]);
        assert_eq!(r.cot_theta_min_exact.clone().unwrap(), Surd::one());
        assert_eq!(rationality_round(&r, 1000), Some(vec![q(0), q(0), q(0), q(3)]));
        // the float path finds the same divisor
        let float_only = MinAngleResult { d_star_exact: None, ..r };
        assert_eq!(rationality_round(&float_only, 1000), Some(vec![q(0), q(0), q(0), q(3)]));
    }
}
